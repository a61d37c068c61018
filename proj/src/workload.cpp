#include "segsketch/workload.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <cctype>
#include <unordered_set>

#include "segsketch/errors.hpp"
#include "segsketch/hash.hpp"

namespace segsketch {

namespace {

constexpr std::string_view kTruthHeader = "host,role,prefix_len,subnet_cardinality,flow_cardinality";

// Uniform in [0, n) from one 64-bit draw; library distributions are not
// portable across standard libraries and generated files must be.
std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

std::size_t in_range(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(below(rng, hi - lo + 1));
}

Address draw_address(std::mt19937_64& rng) { return static_cast<Address>(rng() >> 32); }

int common_prefix(const std::vector<Address>& peers) {
  if (peers.empty()) return 32;
  Address diff = 0;
  for (Address a : peers) diff |= a ^ peers.front();
  return std::countl_zero(diff);
}

// Appends distinct values from draw() to `out` until it holds `count` entries,
// skipping anything already in `taken`. Draw order is kept.
template <class Draw>
void fill_distinct(std::vector<Address>& out, std::unordered_set<Address>& taken, std::size_t count, Draw&& draw) {
  while (out.size() < count) {
    const Address a = draw();
    if (taken.insert(a).second) out.push_back(a);
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto pos = s.find(',');
    out.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

bool is_trace_header(std::string_view line) {
  const auto f = split_commas(line);
  if (f.size() != 2) return false;
  auto lower = [](std::string_view v) {
    std::string s(v);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
  };
  return lower(f[0]) == "src" && lower(f[1]) == "dst";
}

std::uint64_t parse_count(std::string_view s, std::size_t line, const char* field) {
  std::uint64_t v = 0;
  if (s.empty()) throw ParseError(line, std::string("empty ") + field);
  for (char c : s) {
    if (c < '0' || c > '9') throw ParseError(line, std::string("bad ") + field + " '" + std::string(s) + "'");
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

}  // namespace

const char* to_string(Role role) noexcept {
  switch (role) {
    case Role::Spreader: return "spreader";
    case Role::Receiver: return "receiver";
    case Role::Benign: return "benign";
    case Role::BenignDiverse: return "benign-diverse";
  }
  return "?";
}

std::optional<Role> parse_role(std::string_view text) noexcept {
  if (text == "spreader") return Role::Spreader;
  if (text == "receiver") return Role::Receiver;
  if (text == "benign") return Role::Benign;
  if (text == "benign-diverse") return Role::BenignDiverse;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// GroundTruth

GroundTruth::GroundTruth(std::vector<HostTruth> hosts) {
  for (const HostTruth& h : hosts) add(h);
}

void GroundTruth::add(const HostTruth& h) {
  auto [it, inserted] = index_.emplace(h.host, hosts_.size());
  if (!inserted) throw InvalidSpec("host " + format_address(h.host) + " labeled twice");
  hosts_.push_back(h);
}

const HostTruth* GroundTruth::find(Address host) const {
  auto it = index_.find(host);
  return it == index_.end() ? nullptr : &hosts_[it->second];
}

std::size_t GroundTruth::count(Role role) const {
  return static_cast<std::size_t>(
      std::count_if(hosts_.begin(), hosts_.end(), [&](const HostTruth& h) { return h.role == role; }));
}

std::vector<HostTruth> GroundTruth::sorted() const {
  std::vector<HostTruth> out = hosts_;
  std::sort(out.begin(), out.end(), [](const HostTruth& a, const HostTruth& b) { return a.host < b.host; });
  return out;
}

// ---------------------------------------------------------------------------
// Generator

void GeneratorSpec::validate() const {
  if (benign_peers_min > benign_peers_max) throw InvalidSpec("benign peer range is empty");
  if (benign_count > 0 && benign_peers_min < 1) throw InvalidSpec("benign hosts need at least one peer");
  if (diverse_count > 0 && diverse_peers < 1) throw InvalidSpec("diverse hosts need at least one peer");
  if (duplication < 1) throw InvalidSpec("duplication factor must be at least 1");
  if (super_ratio && benign_count != attacker_count * *super_ratio) {
    throw InvalidSpec("benign count " + std::to_string(benign_count) + " does not match ratio 1:" +
                      std::to_string(*super_ratio) + " for " + std::to_string(attacker_count) + " attackers");
  }
  if (attacker_count == 0) return;
  if (attacker_prefix_lengths.empty()) throw InvalidSpec("attackers need at least one prefix length");
  if (attacker_cardinality_min > attacker_cardinality_max) throw InvalidSpec("attacker cardinality range is empty");
  if (attacker_cardinality_min < 2) throw InvalidSpec("attacker cardinality must be at least 2");
  for (int l : attacker_prefix_lengths) {
    if (l < 1 || l > 31) throw InvalidSpec("attacker prefix length must lie in [1, 31]");
    if (attacker_cardinality_max > (std::uint64_t{1} << (32 - l))) {
      throw InvalidSpec("attacker cardinality exceeds the size of a /" + std::to_string(l));
    }
  }
}

GeneratorSpec GeneratorSpec::with_ratio(std::size_t attackers, std::size_t ratio, std::uint64_t seed) {
  GeneratorSpec spec;
  spec.attacker_count = attackers;
  spec.benign_count = attackers * ratio;
  spec.super_ratio = ratio;
  spec.seed = seed;
  return spec;
}

Workload generate(const GeneratorSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(derive_seed(spec.seed, 3001));

  const std::size_t host_total = spec.benign_count + spec.diverse_count + spec.attacker_count;
  std::vector<Address> hosts;
  std::unordered_set<Address> host_set;
  fill_distinct(hosts, host_set, host_total, [&] { return draw_address(rng); });

  std::vector<std::pair<Address, Address>> pairs;
  Workload w;
  const Role super_role = spec.direction == Direction::Spreader ? Role::Spreader : Role::Receiver;
  std::size_t next_host = 0;

  auto emit = [&](Address host, Role role, const std::vector<Address>& peers) {
    for (Address p : peers) pairs.emplace_back(host, p);
    const auto n = static_cast<std::uint64_t>(peers.size());
    w.truth.add({host, role, common_prefix(peers), n, n});
  };

  for (std::size_t i = 0; i < spec.attacker_count; ++i) {
    const Address host = hosts[next_host++];
    const int l = spec.attacker_prefix_lengths[i % spec.attacker_prefix_lengths.size()];
    const std::size_t c = in_range(rng, spec.attacker_cardinality_min, spec.attacker_cardinality_max);
    const Address suffix_mask = (Address{1} << (32 - l)) - 1;
    const Address split_bit = Address{1} << (31 - l);
    const Address base = draw_address(rng) & ~suffix_mask;
    // Two peers on either side of bit l pin the common prefix to exactly l.
    std::vector<Address> peers;
    std::unordered_set<Address> taken;
    const Address low = base | (draw_address(rng) & suffix_mask & ~split_bit);
    const Address high = base | split_bit | (draw_address(rng) & suffix_mask);
    for (Address a : {low, high}) {
      taken.insert(a);
      peers.push_back(a);
    }
    fill_distinct(peers, taken, c, [&] { return base | (draw_address(rng) & suffix_mask); });
    emit(host, super_role, peers);
  }

  for (std::size_t i = 0; i < spec.diverse_count; ++i) {
    const Address host = hosts[next_host++];
    std::vector<Address> peers;
    std::unordered_set<Address> taken;
    fill_distinct(peers, taken, spec.diverse_peers, [&] { return draw_address(rng); });
    emit(host, Role::BenignDiverse, peers);
  }

  for (std::size_t i = 0; i < spec.benign_count; ++i) {
    const Address host = hosts[next_host++];
    const std::size_t n = in_range(rng, spec.benign_peers_min, spec.benign_peers_max);
    std::vector<Address> peers;
    std::unordered_set<Address> taken;
    fill_distinct(peers, taken, n, [&] { return draw_address(rng); });
    emit(host, Role::Benign, peers);
  }

  w.trace.reserve(pairs.size() * spec.duplication);
  for (const auto& [host, peer] : pairs) {
    const PacketRecord rec = spec.direction == Direction::Spreader ? PacketRecord{host, peer} : PacketRecord{peer, host};
    for (std::size_t k = 0; k < spec.duplication; ++k) w.trace.push_back(rec);
  }
  for (std::size_t i = w.trace.size(); i > 1; --i) {
    std::swap(w.trace[i - 1], w.trace[static_cast<std::size_t>(below(rng, i))]);
  }
  return w;
}

GroundTruth recompute_truth(const std::vector<PacketRecord>& trace, Direction direction, const GroundTruth& labels) {
  std::unordered_map<Address, std::unordered_set<Address>> peers;
  for (const PacketRecord& rec : trace) {
    const HostPeer hp = orient(direction, rec.src, rec.dst);
    if (labels.find(hp.host)) peers[hp.host].insert(hp.peer);
  }
  GroundTruth out;
  for (const HostTruth& label : labels.hosts()) {
    std::vector<Address> set;
    if (auto it = peers.find(label.host); it != peers.end()) set.assign(it->second.begin(), it->second.end());
    const int l = common_prefix(set);
    std::uint64_t inside = 0;
    const Address mask = l == 0 ? 0 : ~Address{0} << (32 - l);
    for (Address a : set) inside += (a & mask) == (set.front() & mask);
    out.add({label.host, label.role, l, inside, static_cast<std::uint64_t>(set.size())});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trace and truth files

TraceReader::TraceReader(const std::string& path) : in_(path) {
  if (!in_) throw IoError("cannot open trace '" + path + "'");
}

std::optional<PacketRecord> TraceReader::next() {
  while (std::getline(in_, buf_)) {
    ++line_;
    const std::string_view line = trim(buf_);
    if (line.empty()) continue;
    if (line_ == 1 && is_trace_header(line)) continue;
    const auto fields = split_commas(line);
    if (fields.size() != 2) throw ParseError(line_, "expected two fields 'src,dst'");
    const auto src = parse_address(fields[0]);
    const auto dst = parse_address(fields[1]);
    if (!src) throw ParseError(line_, "bad source address '" + std::string(fields[0]) + "'");
    if (!dst) throw ParseError(line_, "bad destination address '" + std::string(fields[1]) + "'");
    return PacketRecord{*src, *dst};
  }
  if (in_.bad()) throw IoError("read failed at line " + std::to_string(line_));
  return std::nullopt;
}

void for_each_record(const std::string& path, const std::function<void(const PacketRecord&)>& fn) {
  TraceReader reader(path);
  while (auto rec = reader.next()) fn(*rec);
}

std::vector<PacketRecord> read_trace(const std::string& path) {
  std::vector<PacketRecord> out;
  for_each_record(path, [&](const PacketRecord& r) { out.push_back(r); });
  return out;
}

TraceWriter::TraceWriter(const std::string& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError("cannot open '" + path + "' for writing");
}

void TraceWriter::write(const PacketRecord& rec) {
  out_ << format_address(rec.src) << ',' << format_address(rec.dst) << '\n';
}

void TraceWriter::close() {
  out_.close();
  if (!out_) throw IoError("write to '" + path_ + "' failed");
}

void write_truth(const std::string& path, const GroundTruth& truth) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << kTruthHeader << '\n';
  for (const HostTruth& h : truth.hosts()) {
    out << format_address(h.host) << ',' << to_string(h.role) << ',' << h.prefix_len << ','
        << h.subnet_cardinality << ',' << h.flow_cardinality << '\n';
  }
  out.close();
  if (!out) throw IoError("write to '" + path + "' failed");
}

GroundTruth read_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open truth file '" + path + "'");
  GroundTruth truth;
  std::string buf;
  std::size_t line = 0;
  while (std::getline(in, buf)) {
    ++line;
    const std::string_view s = trim(buf);
    if (s.empty()) continue;
    if (line == 1) {
      if (s != kTruthHeader) throw ParseError(line, "expected header '" + std::string(kTruthHeader) + "'");
      continue;
    }
    const auto f = split_commas(s);
    if (f.size() != 5) throw ParseError(line, "expected five fields");
    HostTruth h;
    const auto host = parse_address(f[0]);
    if (!host) throw ParseError(line, "bad host address '" + std::string(f[0]) + "'");
    const auto role = parse_role(f[1]);
    if (!role) throw ParseError(line, "unknown role '" + std::string(f[1]) + "'");
    h.host = *host;
    h.role = *role;
    const auto l = parse_count(f[2], line, "prefix_len");
    if (l > 32) throw ParseError(line, "prefix_len above 32");
    h.prefix_len = static_cast<int>(l);
    h.subnet_cardinality = parse_count(f[3], line, "subnet_cardinality");
    h.flow_cardinality = parse_count(f[4], line, "flow_cardinality");
    if (h.subnet_cardinality > h.flow_cardinality) throw ParseError(line, "subnet cardinality exceeds flow cardinality");
    try {
      truth.add(h);
    } catch (const InvalidSpec& e) {
      throw ParseError(line, e.what());
    }
  }
  return truth;
}

void write_trace(const std::string& trace_path, const std::vector<PacketRecord>& trace, const std::string& truth_path,
                 const GroundTruth& truth) {
  TraceWriter writer(trace_path);
  for (const PacketRecord& r : trace) writer.write(r);
  writer.close();
  if (!truth_path.empty()) write_truth(truth_path, truth);
}

}  // namespace segsketch
