#include "acoustic/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace acoustic::synth {

namespace {

using timeutil::TimeMs;

// splitmix64 finalizer; the generator is counter-based so identical configs
// reproduce identical bytes regardless of host or thread schedule.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t chain(std::uint64_t h, std::uint64_t v) { return mix(h ^ v); }

double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

// Distinct sub-streams of the seed.
enum Stream : std::uint64_t {
  kSamples = 1,
  kBurstNode,
  kBurstStart,
  kBurstDuration,
  kRainDay,
  kRainStart,
  kRainDuration,
  kRainNodes,
};

struct Burst {
  int node;
  TimeMs start, end;
};

struct RainSegment {
  TimeMs start, end;
  std::vector<bool> affected;
};

struct Schedule {
  std::vector<Burst> bursts;
  std::vector<RainSegment> rains;
};

int uniform_int(std::uint64_t key, int n) {
  return static_cast<int>(to_unit(mix(key)) * n);  // n small; modulo bias irrelevant here
}

bool overlaps(TimeMs a0, TimeMs a1, TimeMs b0, TimeMs b1) { return a0 < b1 && b0 < a1; }

Schedule build_schedule(const SynthConfig& cfg, TimeMs run_start) {
  Schedule sched;

  // Rain first: bursts colliding with rain are dropped so ground-truth
  // activity and rain never overlap.
  for (int r = 0; r < cfg.rain_count; ++r) {
    const int day = uniform_int(chain(chain(cfg.seed, kRainDay), r), cfg.days);
    int dur = cfg.rain_min_minutes +
              uniform_int(chain(chain(cfg.seed, kRainDuration), r),
                          cfg.rain_max_minutes - cfg.rain_min_minutes + 1);
    dur -= dur % 5;  // slot-aligned
    const int slots = dur / 5;
    const int start_slot =
        uniform_int(chain(chain(cfg.seed, kRainStart), r), timeutil::kWindowsPerDay - slots + 1);
    RainSegment seg;
    seg.start = run_start + day * timeutil::kMsPerDay + start_slot * timeutil::kMsPerWindow;
    seg.end = seg.start + slots * timeutil::kMsPerWindow;

    bool collides = false;
    for (const auto& other : sched.rains)
      if (overlaps(seg.start, seg.end, other.start, other.end)) collides = true;
    if (collides) continue;

    const int affected_count = std::min(
        cfg.node_count,
        static_cast<int>(std::ceil(cfg.rain_node_fraction * cfg.node_count - 1e-9)));
    std::vector<int> order(cfg.node_count);
    for (int i = 0; i < cfg.node_count; ++i) order[i] = i;
    for (int i = 0; i < affected_count; ++i) {
      const int j =
          i + uniform_int(chain(chain(chain(cfg.seed, kRainNodes), r), i), cfg.node_count - i);
      std::swap(order[i], order[j]);
    }
    seg.affected.assign(cfg.node_count, false);
    for (int i = 0; i < affected_count; ++i) seg.affected[order[i]] = true;
    sched.rains.push_back(std::move(seg));
  }

  for (int day = 0; day < cfg.days; ++day) {
    for (int b = 0; b < cfg.bursts_per_day; ++b) {
      const std::uint64_t id = chain(static_cast<std::uint64_t>(day) << 16, b);
      const int node = uniform_int(chain(chain(cfg.seed, kBurstNode), id), cfg.node_count);
      const int dur = cfg.burst_min_minutes +
                      uniform_int(chain(chain(cfg.seed, kBurstDuration), id),
                                  cfg.burst_max_minutes - cfg.burst_min_minutes + 1);
      const int start_minute =
          uniform_int(chain(chain(cfg.seed, kBurstStart), id), 24 * 60 - dur + 1);
      Burst burst{node,
                  run_start + day * timeutil::kMsPerDay + start_minute * timeutil::kMsPerMinute,
                  0};
      burst.end = burst.start + dur * timeutil::kMsPerMinute;

      bool collides = false;
      for (const auto& seg : sched.rains)
        if (overlaps(burst.start, burst.end, seg.start, seg.end)) collides = true;
      for (const auto& other : sched.bursts)
        if (other.node == node && overlaps(burst.start, burst.end, other.start, other.end))
          collides = true;
      if (!collides) sched.bursts.push_back(burst);
    }
  }
  return sched;
}

// Gaussian draw keyed by (seed, node, global sample index).
double normal_draw(std::uint64_t node_key, std::int64_t sample_index) {
  const double u1 = to_unit(mix(node_key ^ static_cast<std::uint64_t>(2 * sample_index)));
  const double u2 = to_unit(mix(node_key ^ static_cast<std::uint64_t>(2 * sample_index + 1)));
  const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

struct Generator {
  const SynthConfig& cfg;
  TimeMs run_start;
  Schedule schedule;

  explicit Generator(const SynthConfig& c)
      : cfg(c),
        run_start([&] {
          const auto t = timeutil::parse_utc_date(c.start_date);
          if (!t) throw std::invalid_argument("bad start_date '" + c.start_date + "'");
          return *t;
        }()),
        schedule(build_schedule(c, run_start)) {}

  std::uint64_t key_for(int node) const {
    return chain(chain(cfg.seed, kSamples), static_cast<std::uint64_t>(node));
  }

  // The 3000 raw values of one window; events overlapping the window are
  // gathered once so the per-sample loop stays tight.
  void window_values(int node, std::uint64_t node_key, TimeMs start, int* out) const {
    const TimeMs end = start + timeutil::kMsPerWindow;
    const int hour = static_cast<int>((start - timeutil::day_floor(start)) / (3600 * 1000));
    const auto& prof = cfg.profile[hour];

    struct Extra {
      TimeMs start, end;
      double amount;
    };
    Extra extras[8];
    int n_extras = 0;
    for (const auto& b : schedule.bursts)
      if (b.node == node && overlaps(b.start, b.end, start, end) && n_extras < 8)
        extras[n_extras++] = {b.start, b.end, cfg.burst_sigma * prof.std};
    for (const auto& seg : schedule.rains)
      if (seg.affected[node] && overlaps(seg.start, seg.end, start, end) && n_extras < 8)
        extras[n_extras++] = {seg.start, seg.end, cfg.rain_sigma * prof.std};

    const std::int64_t base_index = (start - run_start) / 100;
    for (int s = 0; s < histo::kSamplesPerWindow; ++s) {
      double level = prof.mean + prof.std * normal_draw(node_key, base_index + s);
      if (n_extras > 0) {
        const TimeMs ts = start + s * 100;
        for (int e = 0; e < n_extras; ++e)
          if (ts >= extras[e].start && ts < extras[e].end) level += extras[e].amount;
      }
      out[s] = static_cast<int>(std::clamp(std::round(level), 0.0, 1023.0));
    }
  }
};

std::string hour_class(const SynthConfig& cfg, int hour) {
  double lo = cfg.profile[0].mean, hi = cfg.profile[0].mean;
  for (const auto& p : cfg.profile) {
    lo = std::min(lo, p.mean);
    hi = std::max(hi, p.mean);
  }
  const double span = hi - lo;
  const double m = cfg.profile[hour].mean;
  if (m <= lo + span / 3.0) return "NP";
  if (m >= hi - span / 3.0) return "RP";
  return "AP";
}

}  // namespace

std::array<HourProfile, 24> urban_profile() {
  std::array<HourProfile, 24> p;
  for (int h = 0; h < 24; ++h) p[h] = {4.0, 2.0};       // night
  for (int h = 6; h < 8; ++h) p[h] = {8.0, 3.0};        // morning ramp
  for (int h = 8; h < 10; ++h) p[h] = {14.0, 4.0};      // morning peak
  for (int h = 10; h < 16; ++h) p[h] = {12.0, 4.0};     // midday
  for (int h = 16; h < 18; ++h) p[h] = {18.0, 5.0};     // afternoon build-up
  for (int h = 18; h < 21; ++h) p[h] = {30.0, 7.0};     // evening peak
  for (int h = 21; h < 23; ++h) p[h] = {12.0, 4.0};     // wind-down
  p[23] = {6.0, 2.5};
  return p;
}

std::array<HourProfile, 24> flat_profile(double mean, double std) {
  std::array<HourProfile, 24> p;
  p.fill({mean, std});
  return p;
}

std::string node_name(int node) { return "n" + std::to_string(node + 1); }

void SynthConfig::validate() const {
  if (node_count < 1) throw std::invalid_argument("node_count must be >= 1");
  if (days < 1) throw std::invalid_argument("days must be >= 1");
  if (!timeutil::parse_utc_date(start_date))
    throw std::invalid_argument("bad start_date '" + start_date + "'");
  if (bursts_per_day < 0) throw std::invalid_argument("bursts_per_day must be >= 0");
  if (burst_min_minutes < 1 || burst_min_minutes > burst_max_minutes ||
      burst_max_minutes > 24 * 60)
    throw std::invalid_argument("burst duration range must satisfy 1 <= min <= max <= 1440");
  if (burst_sigma < 0.0) throw std::invalid_argument("burst_sigma must be >= 0");
  if (rain_count < 0) throw std::invalid_argument("rain_count must be >= 0");
  if (rain_min_minutes < 5 || rain_min_minutes > rain_max_minutes || rain_max_minutes > 24 * 60)
    throw std::invalid_argument("rain duration range must satisfy 5 <= min <= max <= 1440");
  if (rain_sigma < 0.0) throw std::invalid_argument("rain_sigma must be >= 0");
  if (!(rain_node_fraction > 0.0 && rain_node_fraction <= 1.0))
    throw std::invalid_argument("rain_node_fraction must lie in (0, 1]");
  for (const auto& p : profile) {
    if (!(p.std > 0.0)) throw std::invalid_argument("profile std must be > 0");
    if (!(p.mean >= 0.0 && p.mean <= histo::kMaxLevel))
      throw std::invalid_argument("profile mean must lie in [0, 1023]");
  }
}

Dataset generate(const SynthConfig& config) {
  config.validate();
  Generator gen(config);
  Dataset out;
  out.windows.reserve(static_cast<std::size_t>(config.node_count) * config.days *
                      timeutil::kWindowsPerDay);
  out.truth.records.reserve(out.windows.capacity());

  int values[histo::kSamplesPerWindow];
  for (int node = 0; node < config.node_count; ++node) {
    const std::string id = node_name(node);
    const std::uint64_t node_key = gen.key_for(node);
    for (int day = 0; day < config.days; ++day) {
      const TimeMs day_start = gen.run_start + day * timeutil::kMsPerDay;
      for (int slot = 0; slot < timeutil::kWindowsPerDay; ++slot) {
        const TimeMs start = day_start + slot * timeutil::kMsPerWindow;
        gen.window_values(node, node_key, start, values);
        histo::Histogram h;
        for (int value : values) ++h.bins[histo::bin_sample(value) - 1];
        out.windows.push_back({id, start, h, true});

        TruthRecord truth;
        truth.node_id = id;
        truth.window_start = start;
        truth.background = hour_class(config, slot / 12);
        TimeMs burst_overlap = 0;
        for (const auto& b : gen.schedule.bursts) {
          if (b.node != node) continue;
          const TimeMs lo = std::max(start, b.start);
          const TimeMs hi = std::min(start + timeutil::kMsPerWindow, b.end);
          if (hi > lo) burst_overlap += hi - lo;
        }
        truth.activity = 2 * burst_overlap >= timeutil::kMsPerWindow;
        for (const auto& seg : gen.schedule.rains)
          if (seg.affected[node] && start >= seg.start && start < seg.end) truth.rain = true;
        out.truth.records.push_back(std::move(truth));
      }
    }
  }
  return out;
}

std::vector<int> window_samples(const SynthConfig& config, int node,
                                timeutil::TimeMs window_start) {
  config.validate();
  if (node < 0 || node >= config.node_count) throw std::invalid_argument("node out of range");
  Generator gen(config);
  std::vector<int> out(histo::kSamplesPerWindow);
  gen.window_values(node, gen.key_for(node), window_start, out.data());
  return out;
}

void write_raw_csv(const SynthConfig& config, std::ostream& out) {
  config.validate();
  Generator gen(config);
  out << "ts,node_id,value\n";
  int values[histo::kSamplesPerWindow];
  const std::int64_t windows =
      static_cast<std::int64_t>(config.days) * timeutil::kWindowsPerDay;
  for (int node = 0; node < config.node_count; ++node) {
    const std::string id = node_name(node);
    const std::uint64_t node_key = gen.key_for(node);
    for (std::int64_t w = 0; w < windows; ++w) {
      const TimeMs start = gen.run_start + w * timeutil::kMsPerWindow;
      gen.window_values(node, node_key, start, values);
      for (int s = 0; s < histo::kSamplesPerWindow; ++s)
        out << timeutil::format_iso8601(start + s * 100) << ',' << id << ',' << values[s] << '\n';
    }
  }
}

}  // namespace acoustic::synth
