#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "napcomm/pattern.hpp"

namespace napcomm {

// Sparsity pattern of a matrix: values are irrelevant for communication, only
// which (row, col) coordinates are stored. Symmetric-storage files arrive
// already expanded to the full pattern.
struct CoordMatrix {
    std::int64_t rows = 0;
    std::int64_t cols = 0;
    std::vector<std::pair<std::int64_t, std::int64_t>> entries;  // 0-based
};

// Reads a Matrix Market coordinate file (optionally gzip-compressed; detected
// by content, not extension). Accepts real/integer/pattern/complex fields,
// ignores values, and mirrors symmetric/skew-symmetric/hermitian storage.
// Throws std::runtime_error on malformed input, naming the problem.
CoordMatrix read_matrix_market(const std::string& path);

// Row-partitions a square matrix over num_gpus GPUs in contiguous blocks of
// ceil(n/g) rows (the last block may be short) and derives the messages a
// row-partitioned SpMV needs: GPU j sends GPU i one message carrying the
// distinct columns owned by j that appear in i's off-diagonal block, at
// bytes_per_value bytes per column. One host process per GPU; placement
// follows the topology (gpus_per_socket GPUs per socket, socket-major).
CommPattern pattern_from_matrix(const CoordMatrix& matrix, int num_gpus,
                                const Topology& topology, int bytes_per_value = 8);

}  // namespace napcomm
