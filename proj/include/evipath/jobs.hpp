#pragma once

namespace evipath {

// Resolves a requested worker count: a positive request wins, otherwise the
// EVIPATH_JOBS environment variable, otherwise all hardware threads.
// Always returns >= 1.
int resolve_jobs(int requested);

}  // namespace evipath
