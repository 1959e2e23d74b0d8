#pragma once

#include "spsolve/adapter.hpp"
#include "spsolve/baselines.hpp"
#include "spsolve/instances.hpp"
#include "spsolve/io.hpp"
#include "spsolve/linalg.hpp"
#include "spsolve/oracle.hpp"
#include "spsolve/saddle.hpp"
#include "spsolve/solver.hpp"
#include "spsolve/trace.hpp"
#include "spsolve/validate.hpp"
#include "spsolve/vi.hpp"
