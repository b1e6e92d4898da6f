#pragma once

#include "xcir/affine_engine.hpp"
#include "xcir/cir_kernel.hpp"
#include "xcir/common.hpp"
#include "xcir/io.hpp"
#include "xcir/jump_exponents.hpp"
#include "xcir/jump_model.hpp"
#include "xcir/params.hpp"
#include "xcir/path_simulator.hpp"
#include "xcir/rng.hpp"
#include "xcir/scenario.hpp"
#include "xcir/special_functions.hpp"
#include "xcir/stats.hpp"
#include "xcir/validation.hpp"
