// Copyright 2026 The GazeBench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GAZEBENCH_H_
#define GAZEBENCH_H_

#include "gazebench/align.h"
#include "gazebench/annotool.h"
#include "gazebench/cluster.h"
#include "gazebench/core.h"
#include "gazebench/dataset_io.h"
#include "gazebench/edit_distance.h"
#include "gazebench/embedding.h"
#include "gazebench/error.h"
#include "gazebench/faith.h"
#include "gazebench/grid.h"
#include "gazebench/hashing.h"
#include "gazebench/langmetrics.h"
#include "gazebench/parallel.h"
#include "gazebench/png_io.h"
#include "gazebench/porter_stemmer.h"
#include "gazebench/random.h"
#include "gazebench/report.h"
#include "gazebench/roc.h"
#include "gazebench/salmetrics.h"
#include "gazebench/seqmetrics.h"
#include "gazebench/service.h"
#include "gazebench/simdec.h"

#endif  // GAZEBENCH_H_
