#pragma once

#include "anfis/clustering.hpp"
#include "anfis/data.hpp"
#include "anfis/errors.hpp"
#include "anfis/fuzzy.hpp"
#include "anfis/lsq.hpp"
#include "anfis/matrix.hpp"
#include "anfis/metrics.hpp"
#include "anfis/model_io.hpp"
#include "anfis/pso.hpp"
#include "anfis/random.hpp"
#include "anfis/trainer.hpp"
