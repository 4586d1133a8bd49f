// Copyright 2026 The solipsim Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "solipsim/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "solipsim/errors.hpp"
#include "solipsim/rng.hpp"

namespace solipsim {

namespace {

template <class... Ts> struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

// Unitary taking |0> to `fragment`: a Householder reflection times a phase.
Matrix preparation_unitary(const Vector &fragment) {
    const auto d = fragment.size();
    const Complex f0 = fragment[0];
    const Complex phase = std::abs(f0) > 0.0 ? f0 / std::abs(f0) : Complex(1.0);
    const Vector g = std::conj(phase) * fragment;
    Vector u = -g;
    u[0] += 1.0;
    Matrix h = Matrix::Identity(d, d);
    const double un = u.norm();
    if (un > 1e-15) {
        u /= un;
        h -= 2.0 * u * u.adjoint();
    }
    return phase * h;
}

std::vector<std::string> digit_labels(std::size_t dim) {
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < dim; ++k) {
        labels.push_back(std::to_string(k));
    }
    return labels;
}

void require_blank(const PureState &state, const std::string &reg, const std::string &context) {
    const Register r{reg, state.layout().dim(reg)};
    const double p = born(state, ProjectiveMeasurement::computational(r, digit_labels(r.dim))).probabilities()[0];
    if (p < 1.0 - kEqualityTolerance) {
        throw BlankRegisterViolation(context + ": register '" + reg + "' is not blank (P(blank) = " +
                                     std::to_string(p) + ")");
    }
}

void validate_step(const Step &step, std::size_t index, RegisterLayout &layout) {
    const std::string where = "step " + std::to_string(index) + " (" + step.kind() + ")";
    auto require = [&](const std::string &name) {
        if (!layout.contains(name)) {
            throw MalformedInput(where + " references unknown register '" + name + "'");
        }
    };
    std::visit(overloaded{
                   [&](const Prepare &s) {
                       require(s.reg);
                       if (static_cast<std::size_t>(s.fragment.size()) != layout.dim(s.reg)) {
                           throw DimensionError(where + ": fragment length does not match register '" + s.reg + "'");
                       }
                       if (std::abs(s.fragment.norm() - 1.0) > kStructuralTolerance) {
                           throw InvariantViolation(where + ": fragment is not normalized");
                       }
                   },
                   [&](const ApplyIsometry &s) {
                       if (s.targets.size() != s.op.input_layout().size()) {
                           throw DimensionError(where + ": target count does not match the isometry");
                       }
                       for (std::size_t i = 0; i < s.targets.size(); ++i) {
                           require(s.targets[i]);
                           if (layout.dim(s.targets[i]) != s.op.input_layout().registers()[i].dim) {
                               throw DimensionError(where + ": register '" + s.targets[i] + "' has the wrong dimension");
                           }
                       }
                       for (const auto &r : s.op.fresh_registers()) {
                           if (layout.contains(r.name)) {
                               throw MalformedInput(where + ": fresh register '" + r.name + "' already exists");
                           }
                           layout = layout.appended(r);
                       }
                   },
                   [&](const MeasureRecord &s) {
                       const auto targets = s.measurement.target_names();
                       for (std::size_t i = 0; i < targets.size(); ++i) {
                           require(targets[i]);
                           if (layout.dim(targets[i]) != s.measurement.target().registers()[i].dim) {
                               throw DimensionError(where + ": register '" + targets[i] + "' has the wrong dimension");
                           }
                       }
                       std::vector<std::string> records{s.memory};
                       if (s.device) {
                           records.push_back(*s.device);
                       }
                       for (const auto &r : records) {
                           require(r);
                           if (layout.dim(r) != s.measurement.size()) {
                               throw DimensionError(where + ": record register '" + r + "' needs one level per outcome");
                           }
                           if (std::find(targets.begin(), targets.end(), r) != targets.end()) {
                               throw MalformedInput(where + ": record register '" + r + "' is also a target");
                           }
                       }
                       if (s.device && *s.device == s.memory) {
                           throw MalformedInput(where + ": device and memory must differ");
                       }
                   },
                   [&](const Send &s) { require(s.reg); },
               },
               step.action);
}

} // namespace

std::string Step::kind() const {
    return std::visit(overloaded{
                          [](const Prepare &) { return std::string("prepare"); },
                          [](const ApplyIsometry &) { return std::string("isometry"); },
                          [](const MeasureRecord &m) {
                              return std::string(m.coherence == Coherence::announced ? "measure(announced)"
                                                                                     : "measure(coherent)");
                          },
                          [](const Send &) { return std::string("send"); },
                      },
                      action);
}

std::optional<std::string> RoundTrace::label_of(const std::string &agent) const {
    for (const auto &a : announced) {
        if (a.agent == agent) {
            return a.label;
        }
    }
    return std::nullopt;
}

bool HaltingPredicate::satisfied_by(const RoundTrace &trace) const {
    return std::all_of(required.begin(), required.end(), [&](const AnnouncedOutcome &req) {
        return trace.label_of(req.agent) == req.label;
    });
}

// ---------------------------------------------------------------------------
// Protocol
// ---------------------------------------------------------------------------

Protocol::Protocol(RegisterLayout layout, std::vector<Step> steps, HaltingPredicate halting)
    : layout_(std::move(layout)), steps_(std::move(steps)), halting_(std::move(halting)) {
    RegisterLayout current = layout_;
    layouts_.push_back(current);
    for (std::size_t i = 0; i < steps_.size(); ++i) {
        validate_step(steps_[i], i, current);
        layouts_.push_back(current);
    }
    if (!halting_.trivial()) {
        for (const auto &req : halting_.required) {
            const auto it = std::find_if(steps_.begin(), steps_.end(), [&](const Step &s) {
                return s.announced() && s.measure()->agent == req.agent;
            });
            if (it == steps_.end()) {
                throw MalformedInput("halting predicate needs an announced measurement by '" + req.agent + "'");
            }
            if (!it->measure()->measurement.has_label(req.label)) {
                throw MalformedInput("halting predicate uses unknown outcome '" + req.label + "' for '" + req.agent +
                                     "'");
            }
        }
    }
}

std::vector<std::size_t> Protocol::announced_steps() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < steps_.size(); ++i) {
        if (steps_[i].announced()) {
            out.push_back(i);
        }
    }
    return out;
}

std::optional<std::size_t> Protocol::measurement_of(const std::string &agent) const {
    for (std::size_t i = 0; i < steps_.size(); ++i) {
        if (const auto *m = steps_[i].measure(); m != nullptr && m->agent == agent) {
            return i;
        }
    }
    return std::nullopt;
}

Protocol Protocol::without_announced() const {
    std::vector<Step> kept;
    for (const auto &s : steps_) {
        if (!s.announced()) {
            kept.push_back(s);
        }
    }
    return Protocol(layout_, std::move(kept));
}

Protocol Protocol::with_step_replaced(std::size_t index, Step step) const {
    auto steps = steps_;
    steps.at(index) = std::move(step);
    return Protocol(layout_, std::move(steps), halting_);
}

Protocol Protocol::with_step_inserted(std::size_t position, Step step) const {
    if (position > steps_.size()) {
        throw MalformedInput("insertion point past the end of the protocol");
    }
    auto steps = steps_;
    steps.insert(steps.begin() + static_cast<std::ptrdiff_t>(position), std::move(step));
    return Protocol(layout_, std::move(steps), halting_);
}

Protocol Protocol::prefix(std::size_t count) const {
    return Protocol(layout_, std::vector<Step>(steps_.begin(), steps_.begin() + static_cast<std::ptrdiff_t>(count)));
}

// ---------------------------------------------------------------------------
// Unitary execution
// ---------------------------------------------------------------------------

Isometry record_unitary(const MeasureRecord &step, const RegisterLayout &layout) {
    auto names = step.measurement.target_names();
    if (step.device) {
        names.push_back(*step.device);
    }
    names.push_back(step.memory);
    const RegisterLayout local = layout.subset(names);
    const std::size_t k_count = step.measurement.size();
    const auto d = static_cast<Eigen::Index>(local.total_dim());
    Matrix u = Matrix::Zero(d, d);
    for (std::size_t k = 0; k < k_count; ++k) {
        Matrix shift = cyclic_shift(k_count, k);
        if (step.device) {
            shift = kron(cyclic_shift(k_count, k), shift);
        }
        u += kron(step.measurement.outcomes()[k].projector, shift);
    }
    return Isometry::unitary(local, std::move(u));
}

PureState initial_state(const Protocol &p) { return PureState::blank(p.layout()); }

PureState apply_step(const Protocol &p, std::size_t index, const PureState &state, bool check_blank) {
    const Step &step = p.steps().at(index);
    const std::string where = "step " + std::to_string(index) + " [" + step.time_tag + "]";
    return std::visit(overloaded{
                          [&](const Prepare &s) {
                              if (check_blank) {
                                  require_blank(state, s.reg, where);
                              }
                              const Register r{s.reg, state.layout().dim(s.reg)};
                              return embed_apply(Isometry::unitary(RegisterLayout{r}, preparation_unitary(s.fragment)),
                                                 state);
                          },
                          [&](const ApplyIsometry &s) { return embed_apply(s.op, state, s.targets); },
                          [&](const MeasureRecord &s) {
                              if (check_blank) {
                                  if (s.device) {
                                      require_blank(state, *s.device, where);
                                  }
                                  require_blank(state, s.memory, where);
                              }
                              return embed_apply(record_unitary(s, state.layout()), state);
                          },
                          [&](const Send &) { return state; },
                      },
                      step.action);
}

PureState evolve(const Protocol &p, const PureState &state, std::size_t from, std::size_t to) {
    if (from > to || to > p.size()) {
        throw MalformedInput("invalid step range [" + std::to_string(from) + ", " + std::to_string(to) + ")");
    }
    PureState s = state;
    for (std::size_t i = from; i < to; ++i) {
        s = apply_step(p, i, s);
    }
    return s;
}

PureState run_prefix(const Protocol &p, std::size_t count) { return evolve(p, initial_state(p), 0, count); }

PureState run_unitary(const Protocol &p) { return run_prefix(p, p.size()); }

ProjectiveMeasurement memory_measurement(const Protocol &p, std::size_t step_index) {
    const auto *m = p.steps().at(step_index).measure();
    if (m == nullptr) {
        throw MalformedInput("step " + std::to_string(step_index) + " is not a measurement");
    }
    return ProjectiveMeasurement::computational({m->memory, m->measurement.size()}, m->measurement.labels());
}

ProjectiveMeasurement announced_record_measurement(const Protocol &p) {
    const auto announced = p.announced_steps();
    if (announced.empty()) {
        throw MalformedInput("protocol has no announced measurement");
    }
    ProjectiveMeasurement joint = memory_measurement(p, announced.front());
    for (std::size_t i = 1; i < announced.size(); ++i) {
        joint = ProjectiveMeasurement::product(joint, memory_measurement(p, announced[i]));
    }
    return joint;
}

std::map<std::string, std::string> custody_after(const Protocol &p, std::size_t count) {
    std::map<std::string, std::string> custody;
    for (std::size_t i = 0; i < count && i < p.size(); ++i) {
        if (const auto *s = std::get_if<Send>(&p.steps()[i].action)) {
            const auto it = custody.find(s->reg);
            if (it != custody.end() && it->second != s->from) {
                throw MalformedInput("step " + std::to_string(i) + ": '" + s->from + "' does not hold '" + s->reg + "'");
            }
            custody[s->reg] = s->to;
        }
    }
    return custody;
}

// ---------------------------------------------------------------------------
// Sampled execution
// ---------------------------------------------------------------------------

struct Sampler::Node {
    PureState state;
    std::optional<Distribution> dist;
};

Sampler::Sampler(Protocol p) : protocol_(std::move(p)), announced_(protocol_.announced_steps()) {}
Sampler::~Sampler() = default;
Sampler::Sampler(Sampler &&) noexcept = default;
Sampler &Sampler::operator=(Sampler &&) noexcept = default;

Sampler::Node &Sampler::node(const std::vector<std::size_t> &path) {
    if (auto it = nodes_.find(path); it != nodes_.end()) {
        return *it->second;
    }
    const std::size_t depth = path.size();
    const std::size_t stop = depth < announced_.size() ? announced_[depth] : protocol_.size();
    std::unique_ptr<Node> created;
    if (depth == 0) {
        created = std::make_unique<Node>(Node{run_prefix(protocol_, stop), std::nullopt});
    } else {
        std::vector<std::size_t> parent_path(path.begin(), path.end() - 1);
        const Node &parent = node(parent_path);
        const std::size_t index = announced_[depth - 1];
        const auto &meas = protocol_.steps()[index].measure()->measurement;
        const auto collapsed = condition(parent.state, meas, meas.outcomes()[path.back()].label);
        PureState s = apply_step(protocol_, index, collapsed.state);
        created = std::make_unique<Node>(Node{evolve(protocol_, s, index + 1, stop), std::nullopt});
    }
    if (depth < announced_.size()) {
        created->dist = born(created->state, protocol_.steps()[announced_[depth]].measure()->measurement);
    }
    auto &slot = nodes_[path];
    slot = std::move(created);
    return *slot;
}

RoundTrace Sampler::sample(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 rng(seed, stream);
    RoundTrace trace;
    std::vector<std::size_t> path;
    for (std::size_t j = 0; j < announced_.size(); ++j) {
        const auto &dist = *node(path).dist;
        const double u = rng.uniform();
        const auto &probs = dist.probabilities();
        std::size_t pick = probs.size();
        double acc = 0.0;
        std::size_t last_possible = 0;
        for (std::size_t k = 0; k < probs.size(); ++k) {
            if (probs[k] < kImpossibleThreshold) {
                continue;
            }
            last_possible = k;
            acc += probs[k];
            if (u < acc) {
                pick = k;
                break;
            }
        }
        if (pick == probs.size()) {
            pick = last_possible;
        }
        trace.announced.push_back({protocol_.steps()[announced_[j]].measure()->agent, dist.labels()[pick]});
        path.push_back(pick);
    }
    return trace;
}

double Sampler::sequence_probability(const std::vector<std::string> &labels) {
    if (labels.size() != announced_.size()) {
        throw MalformedInput("outcome sequence length does not match the announced steps");
    }
    double p = 1.0;
    std::vector<std::size_t> path;
    for (const auto &label : labels) {
        const auto &dist = *node(path).dist;
        const auto &ls = dist.labels();
        const auto k = static_cast<std::size_t>(std::find(ls.begin(), ls.end(), label) - ls.begin());
        if (k == ls.size()) {
            throw MalformedInput("unknown announced outcome '" + label + "'");
        }
        p *= dist.probabilities()[k];
        if (p < kImpossibleThreshold) {
            return 0.0;
        }
        path.push_back(k);
    }
    return p;
}

RoundTrace run_sampled(const Protocol &p, std::uint64_t seed) {
    Sampler sampler(p);
    return sampler.sample(seed, 0);
}

RoundsOutcome run_rounds(Sampler &sampler, std::uint64_t seed, std::size_t max_rounds) {
    if (max_rounds == 0) {
        throw MalformedInput("max_rounds must be at least 1");
    }
    for (std::size_t r = 1; r <= max_rounds; ++r) {
        RoundTrace trace = sampler.sample(seed, r - 1);
        trace.round = r;
        if (sampler.protocol().halting().satisfied_by(trace)) {
            return {r};
        }
    }
    return {std::nullopt};
}

RoundsOutcome run_rounds(const Protocol &p, std::uint64_t seed, std::size_t max_rounds) {
    Sampler sampler(p);
    return run_rounds(sampler, seed, max_rounds);
}

std::uint64_t SampleCounts::count(const std::vector<std::string> &labels) const {
    const auto it = counts.find(labels);
    return it == counts.end() ? 0 : it->second;
}

SampleCounts sample_counts(const Protocol &p, std::uint64_t seed, std::uint64_t shots, unsigned workers) {
    SampleCounts result;
    for (std::size_t i : p.announced_steps()) {
        result.agents.push_back(p.steps()[i].measure()->agent);
    }
    result.shots = shots;
    workers = std::max(1u, workers);
    std::vector<std::map<std::vector<std::string>, std::uint64_t>> partial(workers);
    auto work = [&](unsigned w) {
        Sampler sampler(p);
        const std::uint64_t begin = shots * w / workers;
        const std::uint64_t end = shots * (w + 1) / workers;
        for (std::uint64_t i = begin; i < end; ++i) {
            const auto trace = sampler.sample(seed, i);
            std::vector<std::string> key;
            key.reserve(trace.announced.size());
            for (const auto &a : trace.announced) {
                key.push_back(a.label);
            }
            ++partial[w][key];
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> threads;
        for (unsigned w = 0; w < workers; ++w) {
            threads.emplace_back(work, w);
        }
        for (auto &t : threads) {
            t.join();
        }
    }
    for (const auto &m : partial) {
        for (const auto &[key, n] : m) {
            result.counts[key] += n;
        }
    }
    return result;
}

} // namespace solipsim
