#ifndef ITC_ALL_HPP
#define ITC_ALL_HPP

#include "itc/ce_methods.hpp"
#include "itc/equivalence.hpp"
#include "itc/eval.hpp"
#include "itc/graph.hpp"
#include "itc/graph_io.hpp"
#include "itc/itc.hpp"
#include "itc/oracle.hpp"
#include "itc/sem_sim.hpp"

#endif  // ITC_ALL_HPP
