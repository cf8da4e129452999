#ifndef IKHAM_IKHAM_HPP
#define IKHAM_IKHAM_HPP

#include "ikham/config.hpp"
#include "ikham/consistency.hpp"
#include "ikham/elliptic.hpp"
#include "ikham/error.hpp"
#include "ikham/field.hpp"
#include "ikham/geometry.hpp"
#include "ikham/gmres.hpp"
#include "ikham/hamiltonian.hpp"
#include "ikham/operators.hpp"
#include "ikham/random_fields.hpp"
#include "ikham/reference_ww.hpp"
#include "ikham/runner.hpp"
#include "ikham/selftest.hpp"
#include "ikham/time_stepper.hpp"

#endif  // IKHAM_IKHAM_HPP
