#ifndef DCTPLUS_DCTPLUS_HPP
#define DCTPLUS_DCTPLUS_HPP

// Umbrella header for the Fast DCT+ library: exact O(n log n) graph Fourier
// transforms for rank-one updates of the path graph, with the dense oracle,
// rank-k chains, a pruned multi-transform ensemble, and the benchmark
// harness.

#include "dctplus/bench.hpp"
#include "dctplus/cauchy.hpp"
#include "dctplus/fast_transform.hpp"
#include "dctplus/graph.hpp"
#include "dctplus/matrix.hpp"
#include "dctplus/nfst.hpp"
#include "dctplus/signal.hpp"
#include "dctplus/spectral.hpp"
#include "dctplus/trig.hpp"

#endif
