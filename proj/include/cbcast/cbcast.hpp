#pragma once

#include "coding_sim.hpp"
#include "demand_expr.hpp"
#include "entropy.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "instance.hpp"
#include "instance_io.hpp"
#include "mis.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "rates.hpp"
#include "report_csv.hpp"
#include "scheme_io.hpp"
#include "schemes.hpp"
#include "tuple_space.hpp"
