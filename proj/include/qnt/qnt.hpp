// Copyright 2026 The qnt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Pauli-Liouville library. The Eigen-based density-matrix reference lives in
// "qnt/density_oracle.hpp" and is linked through qnt::oracle.

#include "qnt/etching.hpp"
#include "qnt/experiments.hpp"
#include "qnt/loss_sim.hpp"
#include "qnt/pauli.hpp"
#include "qnt/protocols.hpp"
#include "qnt/rng.hpp"
#include "qnt/statistics.hpp"
#include "qnt/topology.hpp"
#include "qnt/topology_io.hpp"
