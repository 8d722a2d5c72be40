#include "napcomm/machine.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace napcomm {

using nlohmann::json;

const char* to_string(Flavor f) {
    switch (f) {
        case Flavor::InterCpu: return "inter_cpu";
        case Flavor::InterGpu: return "inter_gpu";
    }
    return "?";
}

const char* to_string(Protocol p) {
    switch (p) {
        case Protocol::Short: return "short";
        case Protocol::Eager: return "eager";
        case Protocol::Rendezvous: return "rendezvous";
    }
    return "?";
}

const char* to_string(Locality l) {
    switch (l) {
        case Locality::OnSocket: return "on_socket";
        case Locality::OnNode: return "on_node";
        case Locality::OffNode: return "off_node";
    }
    return "?";
}

void Topology::validate() const {
    auto positive = [](int v, const char* field) {
        if (v < 1)
            throw std::invalid_argument(std::string("topology.") + field +
                                        " must be at least 1");
    };
    positive(sockets_per_node, "sockets_per_node");
    positive(cores_per_socket, "cores_per_socket");
    positive(gpus_per_socket, "gpus_per_socket");
    positive(procs_per_node, "procs_per_node");
    positive(procs_per_gpu, "procs_per_gpu");
    if (procs_per_node % sockets_per_node != 0)
        throw std::invalid_argument(
            "topology.procs_per_node must divide evenly across sockets");
    if (procs_per_node > sockets_per_node * cores_per_socket)
        throw std::invalid_argument(
            "topology.procs_per_node exceeds available cores");
}

bool ParameterTable::has(Flavor f, Protocol p, Locality l) const {
    return p2p_[static_cast<int>(f)][static_cast<int>(p)][static_cast<int>(l)]
        .has_value();
}

const PostalParams& ParameterTable::p2p(Flavor f, Protocol p, Locality l) const {
    const auto& slot =
        p2p_[static_cast<int>(f)][static_cast<int>(p)][static_cast<int>(l)];
    if (!slot)
        throw std::out_of_range(std::string("no parameters for ") + to_string(f) +
                                " " + to_string(p) + " " + to_string(l));
    return *slot;
}

void ParameterTable::set_p2p(Flavor f, Protocol p, Locality l, PostalParams params) {
    p2p_[static_cast<int>(f)][static_cast<int>(p)][static_cast<int>(l)] = params;
}

static int copy_proc_index(int copy_procs) {
    if (copy_procs == 1) return 0;
    if (copy_procs == 4) return 1;
    throw std::out_of_range("memcpy parameters are measured for 1 or 4 copying "
                            "processes, got " + std::to_string(copy_procs));
}

const PostalParams& ParameterTable::memcpy_params(CopyDirection dir,
                                                  int copy_procs) const {
    const auto& slot = memcpy_[static_cast<int>(dir)][copy_proc_index(copy_procs)];
    if (!slot)
        throw std::out_of_range("no memcpy parameters for " +
                                std::to_string(copy_procs) + " copying processes");
    return *slot;
}

void ParameterTable::set_memcpy(CopyDirection dir, int copy_procs,
                                PostalParams params) {
    memcpy_[static_cast<int>(dir)][copy_proc_index(copy_procs)] = params;
}

void MachineModel::validate() const {
    topology.validate();
    const auto& th = table.thresholds;
    if (th.inter_cpu_short_max < 0 || th.inter_cpu_eager_max <= th.inter_cpu_short_max)
        throw std::invalid_argument(
            "thresholds: need 0 <= inter_cpu_short_max < inter_cpu_eager_max");
    if (th.inter_gpu_eager_max < 0)
        throw std::invalid_argument("thresholds.inter_gpu_eager_max must be >= 0");
    if (th.inter_gpu_short_max >= th.inter_gpu_eager_max)
        throw std::invalid_argument(
            "thresholds: need inter_gpu_short_max < inter_gpu_eager_max");
    if (!(table.rn_inv > 0.0))
        throw std::invalid_argument("rn_inv must be positive");

    auto check = [&](Flavor f, Protocol p) {
        for (Locality l : {Locality::OnSocket, Locality::OnNode, Locality::OffNode}) {
            if (!table.has(f, p, l))
                throw std::invalid_argument(std::string("missing parameters for ") +
                                            to_string(f) + " " + to_string(p) + " " +
                                            to_string(l));
            const PostalParams& pp = table.p2p(f, p, l);
            if (pp.alpha < 0.0 || pp.beta < 0.0 || !std::isfinite(pp.alpha) ||
                !std::isfinite(pp.beta))
                throw std::invalid_argument(
                    std::string("negative or non-finite parameters for ") +
                    to_string(f) + " " + to_string(p) + " " + to_string(l));
        }
    };
    check(Flavor::InterCpu, Protocol::Short);
    check(Flavor::InterCpu, Protocol::Eager);
    check(Flavor::InterCpu, Protocol::Rendezvous);
    check(Flavor::InterGpu, Protocol::Eager);
    check(Flavor::InterGpu, Protocol::Rendezvous);
    // A short tier on the device path is optional; a threshold enabling it
    // demands the parameters and vice versa.
    if (th.inter_gpu_short_max >= 0 &&
        !table.has(Flavor::InterGpu, Protocol::Short, Locality::OffNode))
        throw std::invalid_argument(
            "thresholds.inter_gpu_short_max set but inter_gpu short parameters absent");
    if (table.has(Flavor::InterGpu, Protocol::Short, Locality::OffNode))
        check(Flavor::InterGpu, Protocol::Short);

    for (CopyDirection d : {CopyDirection::HostToDevice, CopyDirection::DeviceToHost})
        for (int procs : {1, 4}) {
            try {
                const PostalParams& pp = table.memcpy_params(d, procs);
                if (pp.alpha < 0.0 || pp.beta < 0.0)
                    throw std::invalid_argument("negative memcpy parameters");
            } catch (const std::out_of_range& e) {
                throw std::invalid_argument(e.what());
            }
        }
}

MachineModel lassen_preset() {
    MachineModel m;
    m.name = "lassen";
    m.topology.sockets_per_node = 2;
    m.topology.cores_per_socket = 20;
    m.topology.gpus_per_socket = 2;
    m.topology.procs_per_node = 40;
    m.topology.procs_per_gpu = 1;

    auto& t = m.table;
    // inter-CPU tiers
    t.set_p2p(Flavor::InterCpu, Protocol::Short, Locality::OnSocket, {3.67e-07, 1.32e-10});
    t.set_p2p(Flavor::InterCpu, Protocol::Short, Locality::OnNode, {9.25e-07, 1.19e-09});
    t.set_p2p(Flavor::InterCpu, Protocol::Short, Locality::OffNode, {1.89e-06, 6.88e-10});
    t.set_p2p(Flavor::InterCpu, Protocol::Eager, Locality::OnSocket, {4.61e-07, 7.12e-11});
    t.set_p2p(Flavor::InterCpu, Protocol::Eager, Locality::OnNode, {1.17e-06, 2.18e-10});
    t.set_p2p(Flavor::InterCpu, Protocol::Eager, Locality::OffNode, {2.44e-06, 3.79e-10});
    t.set_p2p(Flavor::InterCpu, Protocol::Rendezvous, Locality::OnSocket, {3.15e-06, 3.40e-11});
    t.set_p2p(Flavor::InterCpu, Protocol::Rendezvous, Locality::OnNode, {6.77e-06, 1.49e-10});
    t.set_p2p(Flavor::InterCpu, Protocol::Rendezvous, Locality::OffNode, {7.76e-06, 7.97e-11});
    // inter-GPU tiers (no short regime on this machine)
    t.set_p2p(Flavor::InterGpu, Protocol::Eager, Locality::OnSocket, {1.87e-06, 5.79e-11});
    t.set_p2p(Flavor::InterGpu, Protocol::Eager, Locality::OnNode, {2.02e-05, 2.15e-10});
    t.set_p2p(Flavor::InterGpu, Protocol::Eager, Locality::OffNode, {8.95e-06, 1.72e-10});
    t.set_p2p(Flavor::InterGpu, Protocol::Rendezvous, Locality::OnSocket, {1.82e-05, 1.46e-11});
    t.set_p2p(Flavor::InterGpu, Protocol::Rendezvous, Locality::OnNode, {1.93e-05, 2.39e-11});
    t.set_p2p(Flavor::InterGpu, Protocol::Rendezvous, Locality::OffNode, {1.10e-05, 1.72e-10});

    t.set_memcpy(CopyDirection::HostToDevice, 1, {1.30e-05, 1.85e-11});
    t.set_memcpy(CopyDirection::DeviceToHost, 1, {1.27e-05, 1.96e-11});
    t.set_memcpy(CopyDirection::HostToDevice, 4, {1.52e-05, 5.52e-10});
    t.set_memcpy(CopyDirection::DeviceToHost, 4, {1.47e-05, 1.50e-10});

    t.rn_inv = 4.19e-11;
    m.validate();
    return m;
}

Protocol select_protocol(const ParameterTable& table, Flavor flavor, double bytes) {
    if (!(bytes >= 0.0))
        throw std::invalid_argument("select_protocol: negative message size");
    const auto& th = table.thresholds;
    if (flavor == Flavor::InterCpu) {
        if (bytes <= static_cast<double>(th.inter_cpu_short_max)) return Protocol::Short;
        if (bytes <= static_cast<double>(th.inter_cpu_eager_max)) return Protocol::Eager;
        return Protocol::Rendezvous;
    }
    if (th.inter_gpu_short_max >= 0 &&
        bytes <= static_cast<double>(th.inter_gpu_short_max))
        return Protocol::Short;
    return bytes <= static_cast<double>(th.inter_gpu_eager_max) ? Protocol::Eager
                                                                : Protocol::Rendezvous;
}

Protocol select_protocol(const ParameterTable& table, Flavor flavor,
                         std::int64_t bytes) {
    return select_protocol(table, flavor, static_cast<double>(bytes));
}

// ---------------------------------------------------------------------------
// JSON (de)serialization

static json params_to_json(const PostalParams& p) {
    return json{{"alpha", p.alpha}, {"beta", p.beta}};
}

static PostalParams params_from_json(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("alpha") || !j.contains("beta"))
        throw std::runtime_error("machine file: " + where +
                                 " must be an object with alpha and beta");
    PostalParams p;
    p.alpha = j.at("alpha").get<double>();
    p.beta = j.at("beta").get<double>();
    return p;
}

std::string machine_to_json(const MachineModel& m) {
    json j;
    j["name"] = m.name;
    j["topology"] = {
        {"sockets_per_node", m.topology.sockets_per_node},
        {"cores_per_socket", m.topology.cores_per_socket},
        {"gpus_per_socket", m.topology.gpus_per_socket},
        {"procs_per_node", m.topology.procs_per_node},
        {"procs_per_gpu", m.topology.procs_per_gpu},
    };

    auto locs = [&](Flavor f, Protocol p) {
        json out;
        for (Locality l : {Locality::OnSocket, Locality::OnNode, Locality::OffNode})
            out[to_string(l)] = params_to_json(m.table.p2p(f, p, l));
        return out;
    };
    j["point_to_point"]["inter_cpu"] = {
        {"short", locs(Flavor::InterCpu, Protocol::Short)},
        {"eager", locs(Flavor::InterCpu, Protocol::Eager)},
        {"rendezvous", locs(Flavor::InterCpu, Protocol::Rendezvous)},
    };
    j["point_to_point"]["inter_gpu"] = {
        {"eager", locs(Flavor::InterGpu, Protocol::Eager)},
        {"rendezvous", locs(Flavor::InterGpu, Protocol::Rendezvous)},
    };
    if (m.table.has(Flavor::InterGpu, Protocol::Short, Locality::OffNode))
        j["point_to_point"]["inter_gpu"]["short"] = locs(Flavor::InterGpu, Protocol::Short);
    j["memcpy"] = {
        {"h2d",
         {{"1", params_to_json(m.table.memcpy_params(CopyDirection::HostToDevice, 1))},
          {"4", params_to_json(m.table.memcpy_params(CopyDirection::HostToDevice, 4))}}},
        {"d2h",
         {{"1", params_to_json(m.table.memcpy_params(CopyDirection::DeviceToHost, 1))},
          {"4", params_to_json(m.table.memcpy_params(CopyDirection::DeviceToHost, 4))}}},
    };
    j["rn_inv"] = m.table.rn_inv;
    j["thresholds"] = {
        {"inter_cpu_short_max", m.table.thresholds.inter_cpu_short_max},
        {"inter_cpu_eager_max", m.table.thresholds.inter_cpu_eager_max},
        {"inter_gpu_eager_max", m.table.thresholds.inter_gpu_eager_max},
    };
    if (m.table.thresholds.inter_gpu_short_max >= 0)
        j["thresholds"]["inter_gpu_short_max"] = m.table.thresholds.inter_gpu_short_max;
    return j.dump(2) + "\n";
}

static const json& require(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key))
        throw std::runtime_error("machine file: missing " + where + key);
    return j.at(key);
}

MachineModel machine_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("machine file: invalid JSON: ") + e.what());
    }

    MachineModel m;
    m.name = require(j, "name", "").get<std::string>();

    const json& topo = require(j, "topology", "");
    auto topo_int = [&](const char* key) {
        return require(topo, key, "topology.").get<int>();
    };
    m.topology.sockets_per_node = topo_int("sockets_per_node");
    m.topology.cores_per_socket = topo_int("cores_per_socket");
    m.topology.gpus_per_socket = topo_int("gpus_per_socket");
    m.topology.procs_per_node = topo_int("procs_per_node");
    m.topology.procs_per_gpu = topo_int("procs_per_gpu");

    const json& p2p = require(j, "point_to_point", "");
    auto read_tier = [&](Flavor f, Protocol p, const json& tier, const std::string& where) {
        for (Locality l : {Locality::OnSocket, Locality::OnNode, Locality::OffNode}) {
            const json& entry = require(tier, to_string(l), where);
            m.table.set_p2p(f, p, l, params_from_json(entry, where + to_string(l)));
        }
    };
    const json& cpu = require(p2p, "inter_cpu", "point_to_point.");
    read_tier(Flavor::InterCpu, Protocol::Short,
              require(cpu, "short", "point_to_point.inter_cpu."),
              "point_to_point.inter_cpu.short.");
    read_tier(Flavor::InterCpu, Protocol::Eager,
              require(cpu, "eager", "point_to_point.inter_cpu."),
              "point_to_point.inter_cpu.eager.");
    read_tier(Flavor::InterCpu, Protocol::Rendezvous,
              require(cpu, "rendezvous", "point_to_point.inter_cpu."),
              "point_to_point.inter_cpu.rendezvous.");
    const json& gpu = require(p2p, "inter_gpu", "point_to_point.");
    read_tier(Flavor::InterGpu, Protocol::Eager,
              require(gpu, "eager", "point_to_point.inter_gpu."),
              "point_to_point.inter_gpu.eager.");
    read_tier(Flavor::InterGpu, Protocol::Rendezvous,
              require(gpu, "rendezvous", "point_to_point.inter_gpu."),
              "point_to_point.inter_gpu.rendezvous.");
    if (gpu.contains("short"))
        read_tier(Flavor::InterGpu, Protocol::Short, gpu.at("short"),
                  "point_to_point.inter_gpu.short.");

    const json& mc = require(j, "memcpy", "");
    const json& h2d = require(mc, "h2d", "memcpy.");
    const json& d2h = require(mc, "d2h", "memcpy.");
    m.table.set_memcpy(CopyDirection::HostToDevice, 1,
                       params_from_json(require(h2d, "1", "memcpy.h2d."), "memcpy.h2d.1"));
    m.table.set_memcpy(CopyDirection::HostToDevice, 4,
                       params_from_json(require(h2d, "4", "memcpy.h2d."), "memcpy.h2d.4"));
    m.table.set_memcpy(CopyDirection::DeviceToHost, 1,
                       params_from_json(require(d2h, "1", "memcpy.d2h."), "memcpy.d2h.1"));
    m.table.set_memcpy(CopyDirection::DeviceToHost, 4,
                       params_from_json(require(d2h, "4", "memcpy.d2h."), "memcpy.d2h.4"));

    m.table.rn_inv = require(j, "rn_inv", "").get<double>();

    if (j.contains("thresholds")) {
        const json& th = j.at("thresholds");
        auto th_val = [&](const char* key, std::int64_t fallback) {
            return th.contains(key) ? th.at(key).get<std::int64_t>() : fallback;
        };
        m.table.thresholds.inter_cpu_short_max =
            th_val("inter_cpu_short_max", m.table.thresholds.inter_cpu_short_max);
        m.table.thresholds.inter_cpu_eager_max =
            th_val("inter_cpu_eager_max", m.table.thresholds.inter_cpu_eager_max);
        m.table.thresholds.inter_gpu_short_max =
            th_val("inter_gpu_short_max", m.table.thresholds.inter_gpu_short_max);
        m.table.thresholds.inter_gpu_eager_max =
            th_val("inter_gpu_eager_max", m.table.thresholds.inter_gpu_eager_max);
    }

    m.validate();
    return m;
}

MachineModel load_machine(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open machine file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return machine_from_json_text(buf.str());
}

void save_machine(const MachineModel& machine, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write machine file: " + path);
    out << machine_to_json(machine);
    if (!out)
        throw std::runtime_error("failed while writing machine file: " + path);
}

// ---------------------------------------------------------------------------
// Postal-model fit

FitResult fit_postal(std::span<const std::pair<double, double>> samples) {
    if (samples.size() < 2)
        throw std::invalid_argument("fit_postal: need at least two samples");

    double xbar = 0.0, ybar = 0.0;
    for (const auto& [x, y] : samples) {
        xbar += x;
        ybar += y;
    }
    xbar /= static_cast<double>(samples.size());
    ybar /= static_cast<double>(samples.size());

    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : samples) {
        sxx += (x - xbar) * (x - xbar);
        sxy += (x - xbar) * (y - ybar);
    }
    if (sxx == 0.0)
        throw std::invalid_argument(
            "fit_postal: all samples share one message size; slope is undetermined");

    FitResult r;
    r.params.beta = sxy / sxx;
    r.params.alpha = ybar - r.params.beta * xbar;
    r.samples = samples.size();
    for (const auto& [x, y] : samples) {
        double e = y - (r.params.alpha + r.params.beta * x);
        r.residual_sum_squares += e * e;
    }
    return r;
}

}  // namespace napcomm
