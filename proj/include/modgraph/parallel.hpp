#pragma once

#include <cstddef>
#include <functional>

namespace modgraph {

// Worker count for `requested`; 0 means default, which is MODGRAPH_THREADS
// when set and the hardware concurrency otherwise.
std::size_t resolve_threads(std::size_t requested);

// Calls body(i) for every i in [0, n) across `threads` workers. Work items
// are claimed dynamically, so body must not depend on which worker runs it.
// The first exception thrown by any body is rethrown on the caller.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace modgraph
