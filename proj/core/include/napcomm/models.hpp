#pragma once

#include <cstdint>

#include "napcomm/machine.hpp"

namespace napcomm {

// Additive pieces of a strategy estimate, in seconds. Off-node covers the
// inter-node transport, on-node covers intra-node gather/redistribution hops,
// copy covers host<->device staging.
struct CostBreakdown {
    double on_node = 0.0;
    double off_node = 0.0;
    double copy = 0.0;

    double total() const { return on_node + off_node + copy; }
};

// time to send one message of `bytes` under a single postal parameter pair.
double postal_time(const PostalParams& params, double bytes);

// Max-rate model of a rank's inter-node sends: latency is paid per message,
// and the transfer term is the slower of the node's aggregate injection
// (s_node bytes against rn_inv) and the rank's own stream (s_proc bytes
// against the off-node beta of `protocol`). Inter-CPU parameters throughout.
double maxrate_time(const ParameterTable& table, std::int64_t m, double s_proc,
                    double s_node, Protocol protocol);

// On-node gather across a socket: gps-1 hops stay on the socket and gps hops
// cross it, each moving s bytes under `protocol` of `flavor`.
double t_on(const ParameterTable& table, Flavor flavor, Protocol protocol,
            double s, int gps);

// On-node redistribution when s bytes spread over pps/ppg cooperating ranks:
// pps/ppg - 1 on-socket hops plus pps/ppg cross-socket hops of s bytes each.
// Host-staged (inter-CPU) by construction; ppg must divide pps.
double t_on_split(const ParameterTable& table, Protocol protocol, double s,
                  int pps, int ppg);

// Inter-node cost of a rank sending m messages totalling s_proc bytes while
// its node injects s_node bytes: per-message latency plus the max-rate
// transfer term. Inter-CPU off-node parameters.
double t_off(const ParameterTable& table, Protocol protocol, std::int64_t m,
             double s_proc, double s_node);

// Device-aware inter-node cost: plain postal model on the inter-GPU off-node
// parameters, m messages, s bytes total.
double t_off_da(const ParameterTable& table, Protocol protocol, std::int64_t m,
                double s);

// Host<->device staging: one H2D transfer of s_send bytes plus one D2H
// transfer of s_recv bytes, using the parameters measured with `copy_procs`
// processes copying concurrently (1 or 4).
double t_copy(const ParameterTable& table, double s_send, double s_recv,
              int copy_procs);

}  // namespace napcomm
