#ifndef LOWTHRUST_LOWTHRUST_HPP
#define LOWTHRUST_LOWTHRUST_HPP

#include "lowthrust/config.hpp"
#include "lowthrust/core_model.hpp"
#include "lowthrust/edelbaum.hpp"
#include "lowthrust/errors.hpp"
#include "lowthrust/numerics.hpp"
#include "lowthrust/pipeline.hpp"
#include "lowthrust/problem.hpp"
#include "lowthrust/propagator.hpp"
#include "lowthrust/report.hpp"
#include "lowthrust/sensitivity.hpp"
#include "lowthrust/ses.hpp"
#include "lowthrust/shooting.hpp"
#include "lowthrust/singular.hpp"
#include "lowthrust/units.hpp"

#endif // LOWTHRUST_LOWTHRUST_HPP
