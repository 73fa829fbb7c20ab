#pragma once

#include "pbsim/error.hpp"
#include "pbsim/modes.hpp"
#include "pbsim/fock.hpp"
#include "pbsim/tensor_oracle.hpp"
#include "pbsim/elements.hpp"
#include "pbsim/sphere.hpp"
#include "pbsim/fit.hpp"
#include "pbsim/harness.hpp"
#include "pbsim/metrology.hpp"
