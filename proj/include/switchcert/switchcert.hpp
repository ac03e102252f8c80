#pragma once

// Umbrella header: certification and synthesis of stabilizing switching
// signals for discrete-time switched linear systems under dwell-time and
// switch restrictions.

#include "switchcert/matrix.hpp"
#include "switchcert/system.hpp"
#include "switchcert/certificates.hpp"
#include "switchcert/signal.hpp"
#include "switchcert/simulate.hpp"
#include "switchcert/problem_io.hpp"
