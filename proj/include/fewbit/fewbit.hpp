#pragma once

#include "fewbit/channel.hpp"
#include "fewbit/constellation.hpp"
#include "fewbit/detect.hpp"
#include "fewbit/errors.hpp"
#include "fewbit/experiment_io.hpp"
#include "fewbit/jed.hpp"
#include "fewbit/quadratic_form.hpp"
#include "fewbit/quantizer.hpp"
#include "fewbit/rng.hpp"
#include "fewbit/sim.hpp"
#include "fewbit/special.hpp"
#include "fewbit/stat_kernels.hpp"
#include "fewbit/types.hpp"
#include "fewbit/verify.hpp"
