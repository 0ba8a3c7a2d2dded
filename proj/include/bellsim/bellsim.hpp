// Copyright (c) 2026 bellsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "bellsim/config.hpp"
#include "bellsim/empirical_model.hpp"
#include "bellsim/errors.hpp"
#include "bellsim/fixtures.hpp"
#include "bellsim/gates.hpp"
#include "bellsim/global_section.hpp"
#include "bellsim/linalg.hpp"
#include "bellsim/measure.hpp"
#include "bellsim/model_io.hpp"
#include "bellsim/pipeline.hpp"
#include "bellsim/process.hpp"
#include "bellsim/rational.hpp"
#include "bellsim/rng.hpp"
#include "bellsim/scenario.hpp"
#include "bellsim/simplex.hpp"
#include "bellsim/source.hpp"
