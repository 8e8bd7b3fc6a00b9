#pragma once

#include "qdisc/circuit.hpp"
#include "qdisc/collective.hpp"
#include "qdisc/errors.hpp"
#include "qdisc/fit.hpp"
#include "qdisc/linalg.hpp"
#include "qdisc/locc.hpp"
#include "qdisc/noisy_sim.hpp"
#include "qdisc/sampling.hpp"
#include "qdisc/states.hpp"
#include "qdisc/two_copy_search.hpp"
