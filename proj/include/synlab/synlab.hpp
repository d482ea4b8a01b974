// Copyright 2026 The synlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "synlab/comparison.hpp"
#include "synlab/config.hpp"
#include "synlab/device.hpp"
#include "synlab/errors.hpp"
#include "synlab/experiment.hpp"
#include "synlab/fitting.hpp"
#include "synlab/normal.hpp"
#include "synlab/report.hpp"
#include "synlab/rng.hpp"
#include "synlab/synapse.hpp"
#include "synlab/waveform.hpp"
