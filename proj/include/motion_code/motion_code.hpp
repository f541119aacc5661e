#ifndef MOTION_CODE_MOTION_CODE_HPP
#define MOTION_CODE_MOTION_CODE_HPP

#include "motion_code/core.hpp"
#include "motion_code/data_io.hpp"
#include "motion_code/error.hpp"
#include "motion_code/inference.hpp"
#include "motion_code/kernel.hpp"
#include "motion_code/objective.hpp"
#include "motion_code/optimizer.hpp"
#include "motion_code/rng.hpp"
#include "motion_code/synthetic.hpp"

#endif
