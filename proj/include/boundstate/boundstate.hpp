#pragma once

#include "boundstate/errors.hpp"
#include "boundstate/scalar_field.hpp"
#include "boundstate/roots.hpp"
#include "boundstate/quadrature.hpp"
#include "boundstate/integrator.hpp"
#include "boundstate/phase_portrait.hpp"
#include "boundstate/aux_functionals.hpp"
#include "boundstate/classifier.hpp"
#include "boundstate/sweep.hpp"
#include "boundstate/verify.hpp"
#include "boundstate/io.hpp"
