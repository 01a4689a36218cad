#pragma once

#include "bistable/config.hpp"
#include "bistable/convolution.hpp"
#include "bistable/errors.hpp"
#include "bistable/experiment.hpp"
#include "bistable/format.hpp"
#include "bistable/kernels.hpp"
#include "bistable/matrix2.hpp"
#include "bistable/minimize.hpp"
#include "bistable/model.hpp"
#include "bistable/operator.hpp"
#include "bistable/report.hpp"
#include "bistable/speeds.hpp"
#include "bistable/waves.hpp"
