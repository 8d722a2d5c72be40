#include "napcomm/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>

#include <zlib.h>

namespace napcomm {

namespace {

// zlib's gz layer reads plain files transparently, so one code path serves
// both compressed and uncompressed inputs.
class LineReader {
public:
    explicit LineReader(const std::string& path)
        : file_(gzopen(path.c_str(), "rb"), &gzclose_wrapper) {
        if (!file_)
            throw std::runtime_error("cannot open matrix file: " + path);
    }

    bool next(std::string& line) {
        line.clear();
        char buf[1 << 16];
        for (;;) {
            if (!gzgets(file_.get(), buf, sizeof buf)) return !line.empty();
            line += buf;
            if (!line.empty() && line.back() == '\n') {
                line.pop_back();
                if (!line.empty() && line.back() == '\r') line.pop_back();
                return true;
            }
        }
    }

private:
    static int gzclose_wrapper(gzFile f) { return f ? gzclose(f) : Z_OK; }
    std::unique_ptr<gzFile_s, decltype(&gzclose_wrapper)> file_;
};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

CoordMatrix read_matrix_market(const std::string& path) {
    LineReader in(path);
    std::string line;
    if (!in.next(line))
        throw std::runtime_error("matrix file is empty: " + path);

    // banner: %%MatrixMarket matrix coordinate <field> <symmetry>
    std::istringstream banner(line);
    std::string magic, object, format, field, symmetry;
    banner >> magic >> object >> format >> field >> symmetry;
    if (lower(magic) != "%%matrixmarket")
        throw std::runtime_error("not a Matrix Market file (bad banner): " + path);
    if (lower(object) != "matrix" || lower(format) != "coordinate")
        throw std::runtime_error("only coordinate-format matrices are supported: " + path);
    field = lower(field);
    symmetry = lower(symmetry);
    if (field != "real" && field != "integer" && field != "pattern" && field != "complex")
        throw std::runtime_error("unknown Matrix Market field '" + field + "': " + path);
    const bool mirrored =
        symmetry == "symmetric" || symmetry == "skew-symmetric" || symmetry == "hermitian";
    if (!mirrored && symmetry != "general")
        throw std::runtime_error("unknown Matrix Market symmetry '" + symmetry + "': " + path);

    // size line (skipping comments and blanks)
    CoordMatrix m;
    std::int64_t nnz = -1;
    for (;;) {
        if (!in.next(line))
            throw std::runtime_error("missing size line: " + path);
        if (line.empty() || line[0] == '%') continue;
        std::istringstream sz(line);
        if (!(sz >> m.rows >> m.cols >> nnz))
            throw std::runtime_error("malformed size line '" + line + "': " + path);
        break;
    }
    if (m.rows < 0 || m.cols < 0 || nnz < 0)
        throw std::runtime_error("negative dimensions in size line: " + path);

    m.entries.reserve(static_cast<std::size_t>(mirrored ? 2 * nnz : nnz));
    std::int64_t seen = 0;
    while (seen < nnz) {
        if (!in.next(line))
            throw std::runtime_error("unexpected end of file after " +
                                     std::to_string(seen) + " of " +
                                     std::to_string(nnz) + " entries: " + path);
        if (line.empty() || line[0] == '%') continue;
        std::istringstream entry(line);
        std::int64_t i = 0, j = 0;
        if (!(entry >> i >> j))
            throw std::runtime_error("malformed entry line '" + line + "': " + path);
        if (i < 1 || i > m.rows || j < 1 || j > m.cols)
            throw std::runtime_error("coordinate (" + std::to_string(i) + ", " +
                                     std::to_string(j) + ") out of bounds: " + path);
        m.entries.emplace_back(i - 1, j - 1);  // values, if any, are ignored
        if (mirrored && i != j) m.entries.emplace_back(j - 1, i - 1);
        ++seen;
    }
    return m;
}

CommPattern pattern_from_matrix(const CoordMatrix& matrix, int num_gpus,
                                const Topology& topology, int bytes_per_value) {
    topology.validate();
    if (matrix.rows != matrix.cols)
        throw std::invalid_argument("pattern_from_matrix: matrix must be square");
    if (num_gpus < 1)
        throw std::invalid_argument("pattern_from_matrix: num_gpus must be >= 1");
    if (bytes_per_value < 1)
        throw std::invalid_argument("pattern_from_matrix: bytes_per_value must be >= 1");

    const std::int64_t n = matrix.rows;
    const std::int64_t block = (n + num_gpus - 1) / num_gpus;  // ceil(n/g), short tail
    auto owner = [&](std::int64_t row) {
        return block == 0 ? 0 : static_cast<int>(row / block);
    };

    CommPattern p;
    p.bytes_per_value = bytes_per_value;
    p.placement.resize(static_cast<std::size_t>(num_gpus));
    const int gpn = topology.gpus_per_node();
    for (int g = 0; g < num_gpus; ++g) {
        ProcPlacement& pl = p.placement[static_cast<std::size_t>(g)];
        pl.gpu = g;
        pl.node = g / gpn;
        pl.socket = pl.node * topology.sockets_per_node +
                    (g % gpn) / topology.gpus_per_socket;
    }

    // GPU owning row i needs the vector entry of every column j its rows
    // touch; entries outside its own block arrive from j's owner. Distinct
    // columns per (owner(j) -> owner(i)) pair define the message volume.
    std::map<std::pair<int, int>, std::set<std::int64_t>> needed;  // (src, dst) -> cols
    for (const auto& [i, j] : matrix.entries) {
        if (i < 0 || i >= n || j < 0 || j >= n)
            throw std::invalid_argument("pattern_from_matrix: coordinate out of bounds");
        const int dst = owner(i);
        const int src = owner(j);
        if (src != dst) needed[{src, dst}].insert(j);
    }

    for (const auto& [pair, cols] : needed) {
        Message m;
        m.src = pair.first;
        m.dst = pair.second;
        m.values.assign(cols.begin(), cols.end());
        m.bytes = static_cast<std::int64_t>(cols.size()) * bytes_per_value;
        p.messages.push_back(std::move(m));
    }
    p.validate();
    return p;
}

}  // namespace napcomm
