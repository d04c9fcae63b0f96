#ifndef ZEROCAL_ZEROCAL_HPP
#define ZEROCAL_ZEROCAL_HPP

#include "zerocal/calibration.hpp"
#include "zerocal/errors.hpp"
#include "zerocal/geometry.hpp"
#include "zerocal/harness.hpp"
#include "zerocal/ik.hpp"
#include "zerocal/io.hpp"
#include "zerocal/kinematics.hpp"
#include "zerocal/metrics.hpp"
#include "zerocal/pose_sampler.hpp"
#include "zerocal/registration.hpp"
#include "zerocal/rng.hpp"

#endif  // ZEROCAL_ZEROCAL_HPP
