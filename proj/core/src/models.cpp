#include "napcomm/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace napcomm {

static void check_bytes(double bytes, const char* fn) {
    if (!(bytes >= 0.0) || !std::isfinite(bytes))
        throw std::invalid_argument(std::string(fn) + ": byte count must be finite and >= 0");
}

static void check_count(std::int64_t m, const char* fn) {
    if (m < 0)
        throw std::invalid_argument(std::string(fn) + ": message count must be >= 0");
}

double postal_time(const PostalParams& params, double bytes) {
    check_bytes(bytes, "postal_time");
    return params.alpha + params.beta * bytes;
}

double maxrate_time(const ParameterTable& table, std::int64_t m, double s_proc,
                    double s_node, Protocol protocol) {
    check_count(m, "maxrate_time");
    check_bytes(s_proc, "maxrate_time");
    check_bytes(s_node, "maxrate_time");
    if (s_proc > s_node)
        throw std::invalid_argument(
            "maxrate_time: a rank cannot inject more than its node (s_proc > s_node)");
    const PostalParams& off = table.p2p(Flavor::InterCpu, protocol, Locality::OffNode);
    return off.alpha * static_cast<double>(m) +
           std::max(s_node * table.rn_inv, s_proc * off.beta);
}

double t_on(const ParameterTable& table, Flavor flavor, Protocol protocol,
            double s, int gps) {
    check_bytes(s, "t_on");
    if (gps < 1)
        throw std::invalid_argument("t_on: gps must be at least 1");
    const PostalParams& os = table.p2p(flavor, protocol, Locality::OnSocket);
    const PostalParams& on = table.p2p(flavor, protocol, Locality::OnNode);
    return static_cast<double>(gps - 1) * postal_time(os, s) +
           static_cast<double>(gps) * postal_time(on, s);
}

double t_on_split(const ParameterTable& table, Protocol protocol, double s,
                  int pps, int ppg) {
    check_bytes(s, "t_on_split");
    if (pps < 1 || ppg < 1)
        throw std::invalid_argument("t_on_split: pps and ppg must be at least 1");
    if (pps % ppg != 0)
        throw std::invalid_argument("t_on_split: ppg must divide pps");
    int hops = pps / ppg;  // cooperating ranks per socket share
    const PostalParams& os = table.p2p(Flavor::InterCpu, protocol, Locality::OnSocket);
    const PostalParams& on = table.p2p(Flavor::InterCpu, protocol, Locality::OnNode);
    return static_cast<double>(hops - 1) * postal_time(os, s) +
           static_cast<double>(hops) * postal_time(on, s);
}

double t_off(const ParameterTable& table, Protocol protocol, std::int64_t m,
             double s_proc, double s_node) {
    return maxrate_time(table, m, s_proc, s_node, protocol);
}

double t_off_da(const ParameterTable& table, Protocol protocol, std::int64_t m,
                double s) {
    check_count(m, "t_off_da");
    check_bytes(s, "t_off_da");
    const PostalParams& off = table.p2p(Flavor::InterGpu, protocol, Locality::OffNode);
    return off.alpha * static_cast<double>(m) + off.beta * s;
}

double t_copy(const ParameterTable& table, double s_send, double s_recv,
              int copy_procs) {
    check_bytes(s_send, "t_copy");
    check_bytes(s_recv, "t_copy");
    const PostalParams& h2d = table.memcpy_params(CopyDirection::HostToDevice, copy_procs);
    const PostalParams& d2h = table.memcpy_params(CopyDirection::DeviceToHost, copy_procs);
    return postal_time(h2d, s_send) + postal_time(d2h, s_recv);
}

}  // namespace napcomm
