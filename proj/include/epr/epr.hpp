// Copyright 2026 The epr-finite Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "epr/composite.hpp"
#include "epr/conditional.hpp"
#include "epr/error.hpp"
#include "epr/lab.hpp"
#include "epr/linalg.hpp"
#include "epr/observable.hpp"
#include "epr/rng.hpp"
#include "epr/state.hpp"
