// tlsmap.hpp — umbrella header for the two-level-system mapping library

#pragma once

#include "tlsmap/analysis.hpp"
#include "tlsmap/ensemble.hpp"
#include "tlsmap/errors.hpp"
#include "tlsmap/geometry.hpp"
#include "tlsmap/hamiltonians.hpp"
#include "tlsmap/integrator.hpp"
#include "tlsmap/quantum_oracle.hpp"
#include "tlsmap/random.hpp"
