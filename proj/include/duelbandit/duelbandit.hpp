#pragma once

#include "duelbandit/adapter.hpp"
#include "duelbandit/core.hpp"
#include "duelbandit/env.hpp"
#include "duelbandit/harness.hpp"
#include "duelbandit/linear_sbm.hpp"
#include "duelbandit/reductions.hpp"
#include "duelbandit/sbm.hpp"
#include "duelbandit/scenarios.hpp"
#include "duelbandit/validators.hpp"
