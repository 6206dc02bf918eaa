#pragma once

#include "scoring/error.hpp"
#include "scoring/extended_real.hpp"
#include "scoring/core.hpp"
#include "scoring/lp.hpp"
#include "scoring/simplex_qp.hpp"
#include "scoring/rules.hpp"
#include "scoring/geometry.hpp"
#include "scoring/propriety.hpp"
#include "scoring/dominance.hpp"
#include "scoring/io.hpp"
#include "scoring/rule_spec.hpp"
