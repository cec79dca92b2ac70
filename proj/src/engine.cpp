#include "repeaterforge/engine.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "repeaterforge/circuits.hpp"
#include "repeaterforge/targetmetric.hpp"
#include "repeaterforge/timewindows.hpp"

namespace rf {

void Topology::validate() const {
  if (nodes.size() < 2 || nodes.size() > 3) throw std::invalid_argument("topology needs two end nodes and at most one repeater");
  if (links.size() + 1 != nodes.size()) throw std::invalid_argument("topology needs exactly one link between consecutive nodes");
  if (!(refractive_index >= 1.0)) throw std::invalid_argument("refractive index must be >= 1");
  for (const auto& l : links) {
    if (!(l.length_left_km >= 0.0 && l.length_right_km >= 0.0) || !std::isfinite(l.length_km()))
      throw std::invalid_argument("link lengths must be finite and nonnegative");
    if (!(l.attenuation_db_per_km > 0.0)) throw std::invalid_argument("fiber attenuation must be positive");
  }
}

double Topology::total_length_km() const {
  double s = 0.0;
  for (const auto& l : links) s += l.length_km();
  return s;
}

std::string to_string(Scheme s) { return s == Scheme::SingleClick ? "single_click" : "double_click"; }

Scheme scheme_from_string(const std::string& s) {
  if (s == "single_click") return Scheme::SingleClick;
  if (s == "double_click") return Scheme::DoubleClick;
  throw std::invalid_argument("unknown scheme '" + s + "'");
}

std::string to_string(DetectorMode m) { return m == DetectorMode::NR ? "NR" : "NNR"; }

DetectorMode detector_from_string(const std::string& s) {
  if (s == "NR") return DetectorMode::NR;
  if (s == "NNR") return DetectorMode::NNR;
  throw std::invalid_argument("unknown detector mode '" + s + "'");
}

void ProtocolConfig::validate() const {
  if (!(cutoff_time > 0.0)) throw std::invalid_argument("cut-off time must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("bright-state parameter must lie in (0,1)");
  if (coincidence_window && !(*coincidence_window >= 0.0)) throw std::invalid_argument("coincidence window must be nonnegative");
  if (n_pairs < 1) throw std::invalid_argument("n_pairs must be at least 1");
}

void Scenario::validate() const {
  topology.validate();
  hardware.validate();
  protocol.validate();
  if (protocol.coincidence_window) {
    if (hardware.platform() != Platform::TrappedIon)
      throw std::invalid_argument("a coincidence window needs the trapped-ion photon shape");
    if (*protocol.coincidence_window > hardware.get("detection_window"))
      throw std::invalid_argument("coincidence window exceeds the detection window");
  }
}

double detection_prob_at(const HardwareParams& hw, double length_km, double attenuation_db_per_km) {
  return hw.get("p_det_zero") * std::pow(10.0, -attenuation_db_per_km * length_km / 10.0);
}

double attempt_duration(const Scenario& sc, int link) {
  const LinkSpec& l = sc.topology.links.at(link);
  const HardwareParams& hw = sc.hardware;
  double overhead = 0.0;
  if (hw.platform() == Platform::TrappedIon) overhead = hw.get("init_duration");
  if (hw.platform() == Platform::Abstract) overhead = hw.get("attempt_overhead");
  return overhead + hw.get("emission_duration") +
         2.0 * std::max(l.length_left_km, l.length_right_km) / sc.topology.fiber_speed();
}

std::vector<LinkModel> build_link_models(const Scenario& sc) {
  const HardwareParams& hw = sc.hardware;
  const ProtocolConfig& pc = sc.protocol;
  std::vector<LinkModel> out;
  double p_min = 1.0;
  for (const auto& l : sc.topology.links) {
    p_min = std::min(p_min, detection_prob_at(hw, l.length_left_km, l.attenuation_db_per_km));
    p_min = std::min(p_min, detection_prob_at(hw, l.length_right_km, l.attenuation_db_per_km));
  }
  auto balanced_alpha = [&](double p_side) {
    if (!(p_side > 0.0)) return pc.alpha;
    return std::min(1.0, pc.alpha * p_min / p_side);
  };
  for (int i = 0; i < static_cast<int>(sc.topology.links.size()); ++i) {
    const LinkSpec& l = sc.topology.links[i];
    LinkModel m;
    m.p_left = detection_prob_at(hw, l.length_left_km, l.attenuation_db_per_km);
    m.p_right = detection_prob_at(hw, l.length_right_km, l.attenuation_db_per_km);
    m.attempt_duration = attempt_duration(sc, i);
    if (pc.scheme == Scheme::DoubleClick) {
      DoubleClickParams p;
      p.p_A = m.p_left;
      p.p_B = m.p_right;
      p.V = hw.get("visibility");
      p.p_dc = hw.get("dark_count");
      p.F_em_A = p.F_em_B = hw.get("emission_fidelity");
      p.mode = pc.detector;
      if (pc.coincidence_window) {
        const PhotonShape shape = shape_from_half_lives(hw.get("hl_wavefunction"), hw.get("hl_emission"));
        const WindowConfig w{hw.get("detection_window"), *pc.coincidence_window};
        p.V = std::pow(visibility(shape, w), 1.0 / hw.visibility_factor());
        p.coincidence = CoincidenceFactors{coincidence_prob_ph_ph(shape, w), coincidence_prob_ph_dc(shape, w),
                                           coincidence_prob_dc_dc(w)};
      }
      m.outcome = double_click_outcome(p);
    } else {
      SingleClickParams p;
      p.p_A = m.p_left;
      p.p_B = m.p_right;
      p.alpha_A = m.alpha_left = balanced_alpha(m.p_left);
      p.alpha_B = m.alpha_right = balanced_alpha(m.p_right);
      p.V = hw.get("visibility");
      p.p_dc = hw.get("dark_count");
      p.p_dexc = hw.has("p_dexc") ? hw.get("p_dexc") : 0.0;
      p.sigma_phase = hw.has("sigma_phase") ? hw.get("sigma_phase") : 0.0;
      p.mode = pc.detector;
      m.outcome = single_click_outcome(p);
    }
    out.push_back(m);
  }
  return out;
}

namespace {

enum class Msg { Req, Confirm, AgreeReq, Ok, LinkSuccess, MoveDone, Cutoff, Discard, Abort, Outcome, Deliver };

const char* msg_name(Msg m) {
  switch (m) {
    case Msg::Req: return "REQ";
    case Msg::Confirm: return "CONFIRM";
    case Msg::AgreeReq: return "AGREE_REQ";
    case Msg::Ok: return "OK";
    case Msg::LinkSuccess: return "LINK_SUCCESS";
    case Msg::MoveDone: return "MOVE_DONE";
    case Msg::Cutoff: return "CUTOFF";
    case Msg::Discard: return "DISCARD";
    case Msg::Abort: return "ABORT";
    case Msg::Outcome: return "OUTCOME";
    case Msg::Deliver: return "DELIVER";
  }
  return "?";
}

struct Event {
  double time = 0.0;
  std::uint64_t seq = 0;
  int node = 0;
  Msg kind = Msg::Req;
  int link = 0;
  long session = 0;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    return a.time > b.time || (a.time == b.time && a.seq > b.seq);
  }
};

struct HeldQubit {
  int node = 0;
  QubitRole role = QubitRole::Communication;
  double last = 0.0;
};

// Two-qubit state of one elementary link, ordered (end node, responder).
struct Pair {
  DensityMatrix rho;
  HeldQubit q[2];
  BellIndex frame;
};

struct Session {
  long id = 0;
  bool open = false;     // responder committed
  bool started = false;  // initiator attempting
  double start = 0.0;
  LinkSample sample;
};

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t run, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(run), static_cast<std::uint32_t>(run >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

class Simulation {
public:
  Simulation(const Scenario& sc, const SimulationOptions& opt)
      : sc_(sc),
        opt_(opt),
        hw_(sc.hardware),
        links_(build_link_models(sc)),
        link_rng_(make_stream(opt.seed, opt.run, 1)),
        noise_rng_(make_stream(opt.seed, opt.run, 2)),
        n_nodes_(static_cast<int>(sc.topology.nodes.size())),
        sessions_(links_.size()),
        attempts_(links_.size(), 0),
        trap_rate_(n_nodes_, 0.0),
        held_(n_nodes_, 0) {
    if (n_nodes_ == 3) {
      long_ = sc.topology.links[0].length_km() > sc.topology.links[1].length_km() ? 0 : 1;
      short_ = 1 - long_;
    }
  }

  SimulationResult run() {
    check_reachable();
    start_cycle(0.0);
    while (!queue_.empty() && static_cast<int>(result_.records.size()) < sc_.protocol.n_pairs) {
      Event e = queue_.top();
      if (e.time > opt_.horizon) break;
      queue_.pop();
      if (e.time < now_) throw std::logic_error("event queue went back in time");
      now_ = e.time;
      ++result_.events;
      dispatch(e);
    }
    return std::move(result_);
  }

private:
  const Scenario& sc_;
  SimulationOptions opt_;
  const HardwareParams& hw_;
  std::vector<LinkModel> links_;
  std::mt19937_64 link_rng_;
  std::mt19937_64 noise_rng_;
  int n_nodes_;
  int long_ = 0;
  int short_ = 0;

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t seq_ = 0;
  double now_ = 0.0;

  std::vector<Session> sessions_;
  long next_session_ = 0;
  std::vector<long> attempts_;
  std::vector<double> trap_rate_;
  std::vector<int> held_;

  std::optional<Pair> long_pair_;
  bool long_generating_ = false;
  bool long_ready_ = false;
  bool short_requested_ = false;
  double long_registered_ = 0.0;
  long cutoff_id_ = 0;
  int discards_ = 0;

  std::optional<DeliveryRecord> pending_;
  SimulationResult result_;

  int end_of(int link) const { return link == 0 ? 0 : n_nodes_ - 1; }
  int responder() const { return 1; }
  double speed() const { return sc_.topology.fiber_speed(); }

  double distance(int a, int b) const {
    if (a == b) return 0.0;
    const int lo = std::min(a, b), hi = std::max(a, b);
    double d = 0.0;
    for (int i = lo; i < hi; ++i) d += sc_.topology.links[i].length_km();
    return d;
  }

  void trace(int node, const std::string& kind, const std::string& detail = "") {
    if (opt_.trace) result_.trace.push_back({now_, node, kind, detail});
  }

  void schedule(double time, int node, Msg kind, int link = 0, long session = 0) {
    queue_.push({time, seq_++, node, kind, link, session});
  }

  void send(int from, int to, Msg kind, int link = 0, long session = 0) {
    const double arrival = now_ + distance(from, to) / speed();
    if (opt_.trace)
      trace(from, std::string("send:") + msg_name(kind), "to=" + std::to_string(to) + " link=" + std::to_string(link) +
                                                             " arrival=" + fmt(arrival));
    schedule(arrival, to, kind, link, session);
  }

  void check_reachable() {
    for (const auto& m : links_)
      if (!(m.outcome.success_prob > 0.0)) throw std::invalid_argument("an elementary link has zero success probability");
    if (n_nodes_ == 3 && std::isinf(opt_.horizon)) {
      double earliest = distance(1, end_of(short_)) / speed() + links_[short_].attempt_duration;
      if (hw_.platform() == Platform::ColorCenter) earliest += move_duration(hw_);
      if (sc_.protocol.cutoff_time < earliest)
        throw std::invalid_argument("cut-off time is shorter than the fastest possible second link; set a horizon");
    }
  }

  void sample_trap_rate(int node) {
    if (hw_.platform() != Platform::TrappedIon || held_[node] > 0) return;
    std::normal_distribution<double> g(0.0, 1.0);
    trap_rate_[node] = g(noise_rng_);
  }

  void decohere(DensityMatrix& rho, int index, HeldQubit& q, double until) {
    if (until <= q.last) return;
    rho = decohere_idle(rho, index, q.role, until - q.last, hw_, trap_rate_[q.node]);
    q.last = until;
  }

  void start_cycle(double t) {
    now_ = t;
    std::fill(attempts_.begin(), attempts_.end(), 0);
    discards_ = 0;
    if (n_nodes_ == 2) {
      send(0, 1, Msg::AgreeReq, 0);
    } else {
      send(0, n_nodes_ - 1, Msg::Req);
    }
  }

  void dispatch(const Event& e) {
    if (opt_.trace && e.kind != Msg::Deliver && e.kind != Msg::LinkSuccess && e.kind != Msg::MoveDone &&
        e.kind != Msg::Cutoff)
      trace(e.node, std::string("recv:") + msg_name(e.kind), "link=" + std::to_string(e.link));
    switch (e.kind) {
      case Msg::Req:
        send(e.node, 0, Msg::Confirm);
        send(e.node, 1, Msg::AgreeReq, 1);
        break;
      case Msg::Confirm: send(0, 1, Msg::AgreeReq, 0); break;
      case Msg::AgreeReq: on_agree_request(e.link); break;
      case Msg::Ok: on_ok(e.link, e.session); break;
      case Msg::LinkSuccess: on_link_success(e.link, e.session); break;
      case Msg::MoveDone:
        if (e.session == cutoff_id_ && long_pair_) {
          long_ready_ = true;
          trace(1, "move_done");
          if (short_requested_) open_session(short_);
        }
        break;
      case Msg::Cutoff: on_cutoff(e.session); break;
      case Msg::Discard: send(e.node, 1, Msg::AgreeReq, long_); break;
      case Msg::Abort: send(e.node, 1, Msg::AgreeReq, short_); break;
      case Msg::Outcome: break;
      case Msg::Deliver: on_deliver(); break;
    }
  }

  void on_agree_request(int link) {
    if (n_nodes_ == 2) {
      open_session(0);
      return;
    }
    if (link == long_) {
      if (!long_generating_ && !long_pair_ && !sessions_[short_].open) open_session(long_);
      return;
    }
    short_requested_ = true;
    if (long_pair_ && long_ready_ && !sessions_[short_].open) open_session(short_);
  }

  void open_session(int link) {
    for (const auto& s : sessions_)
      if (s.open) throw std::logic_error("responder opened a second generation session");
    Session& s = sessions_[link];
    s.id = ++next_session_;
    s.open = true;
    s.started = false;
    s.sample = sample_link(links_[link].outcome, links_[link].attempt_duration, link_rng_);
    if (n_nodes_ == 3 && link == long_) long_generating_ = true;
    if (n_nodes_ == 3 && link == short_) short_requested_ = false;
    sample_trap_rate(responder());
    trace(responder(), "session_open", "link=" + std::to_string(link) + " session=" + std::to_string(s.id));
    send(responder(), end_of(link), Msg::Ok, link, s.id);
  }

  void on_ok(int link, long session) {
    Session& s = sessions_[link];
    if (!s.open || s.id != session) return;
    s.started = true;
    s.start = now_;
    sample_trap_rate(end_of(link));
    trace(end_of(link), "attempts_start",
          "link=" + std::to_string(link) + " attempts=" + std::to_string(s.sample.n_attempts));
    schedule(now_ + s.sample.delay, responder(), Msg::LinkSuccess, link, session);
  }

  Pair make_pair(int link, const LinkSample& sample) {
    const LinkSpec& spec = sc_.topology.links[link];
    const double emitted = now_ - 2.0 * std::max(spec.length_left_km, spec.length_right_km) / speed();
    Pair p;
    // Link states are ordered (left node, right node); pairs are kept as (end node, responder).
    p.rho = link == 0 ? sample.state : permute_qubits(sample.state, {1, 0});
    p.frame = sample.bell_index;
    p.q[0] = {end_of(link), QubitRole::Communication, emitted};
    p.q[1] = {responder(), QubitRole::Communication, emitted};
    if (n_nodes_ == 2) p.q[1].node = 1;
    held_[p.q[0].node] += 1;
    held_[p.q[1].node] += 1;
    return p;
  }

  MoveResult move_qubit(Pair& p, int index) {
    DensityMatrix rho = index == 1 ? p.rho : permute_qubits(p.rho, {1, 0});
    MoveResult m = move_to_memory(rho, hw_);
    p.rho = index == 1 ? m.state : permute_qubits(m.state, {1, 0});
    p.q[index].role = QubitRole::Memory;
    return m;
  }

  void on_link_success(int link, long session) {
    Session& s = sessions_[link];
    if (!s.open || s.id != session) return;
    s.open = false;
    attempts_[link] += s.sample.n_attempts;
    trace(responder(), "session_close", "link=" + std::to_string(link) + " session=" + std::to_string(session));
    trace(responder(), "link_success", "link=" + std::to_string(link) + " attempts=" + std::to_string(s.sample.n_attempts));
    Pair p = make_pair(link, s.sample);
    if (n_nodes_ == 2) {
      decohere(p.rho, 0, p.q[0], now_);
      decohere(p.rho, 1, p.q[1], now_);
      finish(p.rho, p.frame, now_, 0.0);
      held_.assign(held_.size(), 0);
      schedule(now_, 0, Msg::Deliver);
      return;
    }
    if (link == long_) {
      long_generating_ = false;
      long_registered_ = now_;
      ++cutoff_id_;
      if (std::isfinite(sc_.protocol.cutoff_time))
        schedule(now_ + sc_.protocol.cutoff_time, 1, Msg::Cutoff, 0, cutoff_id_);
      if (hw_.platform() == Platform::ColorCenter) {
        decohere(p.rho, 1, p.q[1], now_);
        const double d = move_duration(hw_);
        decohere(p.rho, 1, p.q[1], now_ + d);
        move_qubit(p, 1);
        result_.local_circuit_time += d;
        trace(1, "move", "duration=" + fmt(d));
        if (sc_.protocol.move_to_memory) {
          decohere(p.rho, 0, p.q[0], now_);
          const double de = move_duration(hw_);
          decohere(p.rho, 0, p.q[0], now_ + de);
          move_qubit(p, 0);
          result_.local_circuit_time += de;
          trace(p.q[0].node, "move", "duration=" + fmt(de));
        }
        long_ready_ = false;
        long_pair_ = std::move(p);
        schedule(now_ + d, 1, Msg::MoveDone, 0, cutoff_id_);
      } else {
        long_ready_ = true;
        long_pair_ = std::move(p);
        if (short_requested_) open_session(short_);
      }
      return;
    }
    swap(std::move(p), s.sample.n_attempts);
  }

  void swap(Pair short_pair, long short_attempts) {
    if (!long_pair_) throw std::logic_error("second link completed without a stored first link");
    Pair long_pair = std::move(*long_pair_);
    long_pair_.reset();
    ++cutoff_id_;
    const double storage = now_ - long_registered_;
    for (int i = 0; i < 2; ++i) {
      decohere(long_pair.rho, i, long_pair.q[i], now_);
      decohere(short_pair.rho, i, short_pair.q[i], now_);
    }
    if (hw_.platform() == Platform::ColorCenter) {
      const bool single = sc_.protocol.scheme == Scheme::SingleClick;
      const LinkModel& m = links_[short_];
      const double alpha = single ? (short_ == 0 ? m.alpha_right : m.alpha_left) : 0.5;
      long_pair.rho = apply_induced_dephasing(long_pair.rho, 1, short_attempts, alpha, hw_, single ? 1 : 2);
    }
    // (short end, repeater short, repeater long, long end)
    DensityMatrix four = tensor(short_pair.rho, permute_qubits(long_pair.rho, {1, 0}));
    HeldQubit rs = short_pair.q[1], rl = long_pair.q[1];
    const double d_est = bsm_duration(hw_);
    decohere(four, 1, rs, now_ + d_est);
    decohere(four, 2, rl, now_ + d_est);
    BsmResult bsm = bell_state_measurement(four, hw_, noise_rng_);
    result_.local_circuit_time += bsm.duration;
    trace(1, "swap", "outcome=" + std::to_string(bsm.outcomes[0]) + std::to_string(bsm.outcomes[1]) +
                         " duration=" + fmt(bsm.duration));
    const double sent = now_ + bsm.duration;
    const int end_s = short_pair.q[0].node, end_l = long_pair.q[0].node;
    const double delivery = sent + std::max(distance(1, end_s), distance(1, end_l)) / speed();
    DensityMatrix out = bsm.state;
    HeldQubit qs = short_pair.q[0], ql = long_pair.q[0];
    decohere(out, 0, qs, delivery);
    decohere(out, 1, ql, delivery);
    if (end_s != 0) out = permute_qubits(out, {1, 0});
    const BellIndex frame = compose(compose(short_pair.frame, bsm.frame), long_pair.frame);
    finish(out, frame, delivery, storage);
    held_.assign(held_.size(), 0);
    long_ready_ = false;
    short_requested_ = false;
    const double saved = now_;
    now_ = sent;
    send(1, end_s, Msg::Outcome);
    send(1, end_l, Msg::Outcome);
    now_ = saved;
    schedule(delivery, 0, Msg::Deliver);
  }

  void finish(const DensityMatrix& rho, BellIndex frame, double time, double storage) {
    DeliveryRecord r;
    r.index = static_cast<int>(result_.records.size());
    r.completion_time = time;
    r.state = apply_pauli_correction(rho, frame);
    r.frame = frame;
    r.attempts = attempts_;
    r.storage_time = storage;
    r.discards = discards_;
    pending_ = std::move(r);
  }

  void on_cutoff(long id) {
    if (id != cutoff_id_ || !long_pair_) return;
    trace(1, "cutoff_discard", "stored=" + fmt(now_ - long_registered_));
    ++discards_;
    const int end_l = long_pair_->q[0].node;
    long_pair_.reset();
    ++cutoff_id_;
    long_ready_ = false;
    Session& s = sessions_[short_];
    if (s.open) {
      if (s.started) {
        const double done = std::floor((now_ - s.start) / links_[short_].attempt_duration);
        attempts_[short_] += std::min(s.sample.n_attempts, static_cast<long>(done));
      }
      s.open = false;
      trace(1, "session_close", "link=" + std::to_string(short_) + " session=" + std::to_string(s.id));
    }
    s.id = ++next_session_;
    short_requested_ = false;
    held_.assign(held_.size(), 0);
    send(1, end_l, Msg::Discard, long_);
    send(1, end_of(short_), Msg::Abort, short_);
  }

  void on_deliver() {
    if (!pending_) return;
    trace(0, "delivery", "pair=" + std::to_string(pending_->index));
    result_.records.push_back(std::move(*pending_));
    pending_.reset();
    if (static_cast<int>(result_.records.size()) < sc_.protocol.n_pairs) start_cycle(now_);
  }
};

double sample_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double standard_error(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = sample_mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
}

}  // namespace

SimulationResult run_simulation(const Scenario& sc, const SimulationOptions& opt) {
  sc.validate();
  Simulation sim(sc, opt);
  return sim.run();
}

Metrics compute_metrics(const std::vector<DeliveryRecord>& records, double total_time, double server_T) {
  if (records.empty()) throw std::invalid_argument("no deliveries to summarize");
  if (!(total_time > 0.0)) throw std::invalid_argument("total simulated time must be positive");
  std::vector<double> gaps, f, fd, ft;
  double prev = 0.0;
  for (const auto& r : records) {
    if (r.index == 0) prev = 0.0;
    gaps.push_back(r.completion_time - prev);
    prev = r.completion_time;
    f.push_back(avg_teleportation_fidelity(r.state));
    fd.push_back(avg_dummy_fidelity(r.state));
    ft.push_back(avg_trap_fidelity(r.state));
  }
  Metrics m;
  m.n = static_cast<int>(records.size());
  m.total_time = total_time;
  m.rate = m.n / total_time;
  const double mean_gap = total_time / m.n;
  m.sem_rate = standard_error(gaps) / (mean_gap * mean_gap);
  m.f_tel = sample_mean(f);
  m.sem_f = standard_error(f);
  m.f_dummy = sample_mean(fd);
  m.f_trap = sample_mean(ft);
  const FailureBound b = avg_failure_bound(std::clamp(m.f_dummy, 0.0, 1.0), std::clamp(m.f_trap, 0.0, 1.0), m.rate, server_T);
  m.q_bound = b.q;
  m.vbqc_ok = b.applicable && b.q < 0.25;
  return m;
}

Metrics compute_metrics(const std::vector<DeliveryRecord>& records, double server_T) {
  double total = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (i + 1 == records.size() || records[i + 1].index == 0) total += records[i].completion_time;
  return compute_metrics(records, total, server_T);
}

Evaluation evaluate(const Scenario& sc, std::uint64_t seed, int n_runs, double server_T, bool keep_runs,
                    double horizon) {
  if (n_runs < 1) throw std::invalid_argument("n_runs must be at least 1");
  Evaluation ev;
  std::vector<DeliveryRecord> pooled;
  double total = 0.0;
  for (int r = 0; r < n_runs; ++r) {
    SimulationOptions opt;
    opt.seed = seed;
    opt.run = static_cast<std::uint64_t>(r);
    opt.horizon = horizon;
    SimulationResult res = run_simulation(sc, opt);
    if (static_cast<int>(res.records.size()) < sc.protocol.n_pairs) total += horizon;
    else total += res.records.back().completion_time;
    pooled.insert(pooled.end(), res.records.begin(), res.records.end());
    if (keep_runs) ev.runs.push_back(std::move(res));
  }
  if (pooled.empty()) {
    ev.metrics.total_time = total;
    return ev;
  }
  ev.metrics = compute_metrics(pooled, total, server_T);
  return ev;
}

}  // namespace rf
