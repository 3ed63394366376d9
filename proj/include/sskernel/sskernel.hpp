// Copyright 2026 sskernel contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sskernel/entropy.hpp"
#include "sskernel/grid.hpp"
#include "sskernel/io.hpp"
#include "sskernel/kernels.hpp"
#include "sskernel/processes.hpp"
#include "sskernel/random.hpp"
#include "sskernel/svg.hpp"
#include "sskernel/sysid.hpp"
#include "sskernel/verify.hpp"
