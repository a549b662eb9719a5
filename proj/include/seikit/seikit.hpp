#pragma once

#include "seikit/expr.hpp"
#include "seikit/model.hpp"
#include "seikit/sampling.hpp"
#include "seikit/pattern_search.hpp"
#include "seikit/checks.hpp"
#include "seikit/theorems.hpp"
#include "seikit/nlp.hpp"
#include "seikit/report.hpp"
