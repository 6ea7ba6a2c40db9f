#pragma once

#include "stattree/dataset.hpp"
#include "stattree/decision_engine.hpp"
#include "stattree/descriptive.hpp"
#include "stattree/errors.hpp"
#include "stattree/homogeneity.hpp"
#include "stattree/location_tests.hpp"
#include "stattree/montecarlo.hpp"
#include "stattree/normality.hpp"
#include "stattree/special_functions.hpp"
#include "stattree/test_result.hpp"
