// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace triage {

/// 0 keeps the OpenMP runtime default. All kernels are written so results
/// are bit-identical at any thread count.
void set_thread_count(int threads);
int max_threads();

}  // namespace triage
