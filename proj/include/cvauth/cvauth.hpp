/*
 * Umbrella header for the continuous-variable authentication analysis
 * library. The Fock-basis SRM oracle lives in srm_fock.hpp and is not pulled
 * in here because it requires Eigen.
 */
#pragma once

#include "cvauth/attacks.hpp"
#include "cvauth/bounds.hpp"
#include "cvauth/math.hpp"
#include "cvauth/model.hpp"
#include "cvauth/rng.hpp"
#include "cvauth/simulate.hpp"
#include "cvauth/sweep.hpp"
#include "cvauth/verifier.hpp"
