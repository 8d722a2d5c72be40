#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>

namespace napcomm {

// Transport flavor of a point-to-point parameter set: messages staged through
// host memory travel inter-CPU, device-aware messages travel inter-GPU.
enum class Flavor { InterCpu, InterGpu };

// MPI protocol regime a message falls into, by size.
enum class Protocol { Short, Eager, Rendezvous };

// Relative placement of the two endpoints of a message.
enum class Locality { OnSocket, OnNode, OffNode };

// Direction of a host<->device copy.
enum class CopyDirection { HostToDevice, DeviceToHost };

const char* to_string(Flavor f);
const char* to_string(Protocol p);
const char* to_string(Locality l);

// Latency/inverse-bandwidth pair of the postal model: time(s) = alpha + beta*s.
struct PostalParams {
    double alpha = 0.0;  // seconds
    double beta = 0.0;   // seconds per byte
};

// Node layout. All counts are per the unit named in the field.
struct Topology {
    int sockets_per_node = 1;
    int cores_per_socket = 1;
    int gpus_per_socket = 1;
    int procs_per_node = 1;  // host processes available per node (ppn)
    int procs_per_gpu = 1;   // host processes per GPU in the base placement

    int gpus_per_node() const { return sockets_per_node * gpus_per_socket; }
    // Processes per socket; procs_per_node must divide evenly across sockets.
    int procs_per_socket() const { return procs_per_node / sockets_per_node; }

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

// Message-size cutoffs that decide the protocol regime, two per flavor. The
// inter-GPU path has no short tier on the measured machine, so its short
// cutoff defaults to disabled (-1); a machine file may enable it when it also
// supplies inter-GPU short parameters.
struct ProtocolThresholds {
    std::int64_t inter_cpu_short_max = 512;
    std::int64_t inter_cpu_eager_max = 8192;
    std::int64_t inter_gpu_short_max = -1;  // -1: no short regime
    std::int64_t inter_gpu_eager_max = 8192;
};

// Measured machine parameters: point-to-point postal parameters per
// (flavor, protocol, locality), host<->device copy parameters for one and four
// concurrently copying processes, and the inverse aggregate NIC rate rn_inv
// (seconds per byte injected by a node).
class ParameterTable {
public:
    bool has(Flavor f, Protocol p, Locality l) const;
    // Throws std::out_of_range naming the missing entry.
    const PostalParams& p2p(Flavor f, Protocol p, Locality l) const;
    void set_p2p(Flavor f, Protocol p, Locality l, PostalParams params);

    // copy_procs must be 1 or 4 (the only measured configurations).
    const PostalParams& memcpy_params(CopyDirection dir, int copy_procs) const;
    void set_memcpy(CopyDirection dir, int copy_procs, PostalParams params);

    double rn_inv = 0.0;  // seconds per byte, node injection bottleneck
    ProtocolThresholds thresholds;

private:
    std::optional<PostalParams> p2p_[2][3][3];
    std::optional<PostalParams> memcpy_[2][2];  // [direction][0: 1 proc, 1: 4 procs]
};

// A machine is a topology plus its measured parameter table.
struct MachineModel {
    std::string name;
    Topology topology;
    ParameterTable table;

    // Structural validation: topology fields, threshold ordering, rn_inv > 0,
    // non-negative parameters, and presence of every inter-CPU protocol tier
    // plus the inter-GPU eager/rendezvous tiers. Throws std::invalid_argument.
    void validate() const;
};

// Built-in model of the measured Power9 + V100 system (2 sockets x 20 cores,
// 2 GPUs per socket, up to 40 host processes per node).
MachineModel lassen_preset();

// Load a machine description from a JSON file; throws std::runtime_error with
// the offending key on malformed input. The loaded model is validated.
MachineModel load_machine(const std::string& path);

// Serialize; save_machine writes JSON that load_machine round-trips exactly.
std::string machine_to_json(const MachineModel& machine);
void save_machine(const MachineModel& machine, const std::string& path);
MachineModel machine_from_json_text(const std::string& text);

// Pick the protocol regime for a message of `bytes` under `flavor`.
// Monotone in bytes: Short (where a short tier exists), then Eager, then
// Rendezvous. The double overload serves model compositions whose per-message
// size is an average and may be fractional.
Protocol select_protocol(const ParameterTable& table, Flavor flavor, std::int64_t bytes);
Protocol select_protocol(const ParameterTable& table, Flavor flavor, double bytes);

// Ordinary least squares fit of time = alpha + beta * bytes.
struct FitResult {
    PostalParams params;
    double residual_sum_squares = 0.0;
    std::size_t samples = 0;
};

// samples are (bytes, seconds) pairs; at least two distinct byte sizes are
// required. Uses the centered closed form, so sample order is irrelevant.
FitResult fit_postal(std::span<const std::pair<double, double>> samples);

}  // namespace napcomm
