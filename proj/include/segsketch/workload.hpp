#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "segsketch/address.hpp"
#include "segsketch/segsketch.hpp"

namespace segsketch {

struct PacketRecord {
  Address src;
  Address dst;

  friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

// Spreader/Receiver are the planted super hosts; BenignDiverse hosts reach
// many peers spread across the whole address space.
enum class Role { Spreader, Receiver, Benign, BenignDiverse };

const char* to_string(Role role) noexcept;
std::optional<Role> parse_role(std::string_view text) noexcept;
inline bool is_super(Role role) noexcept { return role == Role::Spreader || role == Role::Receiver; }

struct HostTruth {
  Address host = 0;
  Role role = Role::Benign;
  int prefix_len = 32;         // longest prefix shared by every distinct peer
  std::uint64_t subnet_cardinality = 0;  // distinct peers inside that prefix
  std::uint64_t flow_cardinality = 0;    // all distinct peers

  friend bool operator==(const HostTruth&, const HostTruth&) = default;
};

class GroundTruth {
 public:
  GroundTruth() = default;
  explicit GroundTruth(std::vector<HostTruth> hosts);

  void add(const HostTruth& h);
  const HostTruth* find(Address host) const;
  const std::vector<HostTruth>& hosts() const noexcept { return hosts_; }
  std::size_t size() const noexcept { return hosts_.size(); }
  std::size_t count(Role role) const;

  // Hosts sorted by address, for order-independent comparison.
  std::vector<HostTruth> sorted() const;

 private:
  std::vector<HostTruth> hosts_;
  std::unordered_map<Address, std::size_t> index_;
};

struct GeneratorSpec {
  std::size_t benign_count = 1650;
  std::size_t benign_peers_min = 1;
  std::size_t benign_peers_max = 50;
  std::size_t diverse_count = 20;
  std::size_t diverse_peers = 1000;
  std::size_t attacker_count = 50;
  // Attacker i gets attacker_prefix_lengths[i % size()].
  std::vector<int> attacker_prefix_lengths = {16};
  std::size_t attacker_cardinality_min = 1000;
  std::size_t attacker_cardinality_max = 1000;
  // Benign hosts per attacker. When set, benign_count must equal
  // attacker_count * ratio.
  std::optional<std::size_t> super_ratio;
  std::size_t duplication = 1;
  Direction direction = Direction::Spreader;
  std::uint64_t seed = 1;

  void validate() const;
  // Applies super_ratio to benign_count.
  static GeneratorSpec with_ratio(std::size_t attackers, std::size_t ratio, std::uint64_t seed = 1);
};

struct Workload {
  std::vector<PacketRecord> trace;
  GroundTruth truth;
};

// Throws InvalidSpec.
Workload generate(const GeneratorSpec& spec);

// Recomputes prefix_len, subnet and flow cardinality from the trace for every
// host in `labels`, keeping the labels' roles.
GroundTruth recompute_truth(const std::vector<PacketRecord>& trace, Direction direction,
                            const GroundTruth& labels);

// Streaming CSV reader. Lines are "src,dst" with dotted quads or decimals; an
// optional "src,dst" header and blank lines are skipped.
class TraceReader {
 public:
  explicit TraceReader(const std::string& path);
  // nullopt at end of file. Throws ParseError.
  std::optional<PacketRecord> next();
  std::size_t line() const noexcept { return line_; }

 private:
  std::ifstream in_;
  std::string buf_;
  std::size_t line_ = 0;
};

void for_each_record(const std::string& path, const std::function<void(const PacketRecord&)>& fn);
std::vector<PacketRecord> read_trace(const std::string& path);

class TraceWriter {
 public:
  explicit TraceWriter(const std::string& path);
  void write(const PacketRecord& rec);
  void close();

 private:
  std::string path_;
  std::ofstream out_;
};

// Truth sidecar is CSV: host,role,prefix_len,subnet_cardinality,flow_cardinality.
void write_truth(const std::string& path, const GroundTruth& truth);
GroundTruth read_truth(const std::string& path);

// Writes the trace to `trace_path` and, if non-empty, the truth to `truth_path`.
void write_trace(const std::string& trace_path, const std::vector<PacketRecord>& trace,
                 const std::string& truth_path, const GroundTruth& truth);

}  // namespace segsketch
