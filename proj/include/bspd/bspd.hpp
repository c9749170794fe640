// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "bspd/analysis.hpp"
#include "bspd/bsp.hpp"
#include "bspd/channel.hpp"
#include "bspd/estimators.hpp"
#include "bspd/least_squares.hpp"
#include "bspd/model.hpp"
#include "bspd/parallel.hpp"
#include "bspd/random.hpp"
#include "bspd/sensing.hpp"
#include "bspd/sysmodel.hpp"
#include "bspd/harness/config.hpp"
#include "bspd/harness/output.hpp"
#include "bspd/harness/sweeps.hpp"
#include "bspd/harness/validate.hpp"
