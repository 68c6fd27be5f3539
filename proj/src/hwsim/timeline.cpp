//
// Copyright 2026 The Orbis Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "orbis/hwsim/timeline.hpp"

#include <algorithm>
#include <utility>

namespace orbis::hwsim {

namespace {

struct Interval {
  Cycles start = 0;
  Cycles end = 0;
};

// Tracks an engine's use over time and folds it into an EngineActivity.
struct Usage {
  std::string name;
  Cycles busy = 0;
  Cycles start = -1;
  Cycles end = 0;

  void add(Cycles s, Cycles e) {
    if (e <= s) return;
    busy += e - s;
    start = start < 0 ? s : std::min(start, s);
    end = std::max(end, e);
  }

  EngineActivity activity() const {
    EngineActivity a;
    a.engine = name;
    a.busy_cycles = busy;
    a.start = std::max<Cycles>(start, 0);
    a.end = std::max(end, a.start);
    a.stall_cycles = (a.end - a.start) - busy;
    return a;
  }
};

// Background work on the vector unit: runs only in cycles the DXE leaves
// idle, in release order.
class VectorIdleFiller {
 public:
  explicit VectorIdleFiller(std::vector<Interval> dxe_busy) : busy_(std::move(dxe_busy)) {}

  // Returns [first cycle used, cycle after the last one).
  Interval run(Cycles release, Cycles work) {
    Cycles t = std::max(release, free_);
    if (work == 0) return {t, t};
    Cycles first = -1;
    while (work > 0) {
      while (next_ < busy_.size() && busy_[next_].end <= t) ++next_;
      if (next_ < busy_.size() && busy_[next_].start <= t) {
        t = busy_[next_].end;
        continue;
      }
      const Cycles gap_end = next_ < busy_.size() ? busy_[next_].start : t + work;
      const Cycles used = std::min(work, gap_end - t);
      if (first < 0) first = t;
      t += used;
      work -= used;
    }
    free_ = t;
    return {first, t};
  }

 private:
  std::vector<Interval> busy_;
  std::size_t next_ = 0;
  Cycles free_ = 0;
};

struct DxeRun {
  Usage sa{"sa"};
  Usage vpu{"vpu"};
  std::vector<Interval> vpu_busy;
  std::vector<Cycles> sdpa_ready;  // per layer
  Cycles end = 0;
};

DxeRun run_dxe(const std::vector<std::vector<Op>>& layers) {
  DxeRun run;
  Cycles t = 0;
  for (const auto& ops : layers) {
    for (const Op& op : ops) {
      const Cycles s = t;
      t += op.cycles;
      if (op.unit == Unit::SystolicArray) {
        run.sa.add(s, t);
      } else {
        run.vpu.add(s, t);
        if (t > s) run.vpu_busy.push_back({s, t});
      }
      if (op.sdpa_output) run.sdpa_ready.push_back(t);
    }
  }
  run.end = t;
  return run;
}

}  // namespace

const EngineActivity* StepTimeline::engine(const std::string& name) const {
  for (const EngineActivity& a : engines) {
    if (a.engine == name) return &a;
  }
  return nullptr;
}

void TimelineReport::append(StepTimeline step) {
  dxe_cycles += step.dxe_cycles;
  critical_path_cycles += step.critical_path_cycles;
  matching_cycles += step.matching_cycles;
  hidden_matching_cycles += step.hidden_matching_cycles;
  steps.push_back(std::move(step));
}

std::vector<std::vector<Op>> step_ops(const HwWorkload& wl, const HardwareConfig& cfg, double ratio) {
  const std::vector<Op> layer = layer_ops(wl, cfg, ratio);
  return std::vector<std::vector<Op>>(static_cast<std::size_t>(wl.model.n_layers), layer);
}

StepTimeline schedule_fc_step(const HwWorkload& wl, MatchingMode mode, double ratio, const HardwareConfig& cfg) {
  cfg.validate();
  DxeRun dxe = run_dxe(step_ops(wl, cfg, 0.0));

  StepTimeline st;
  st.kind = StepKind::Full;
  st.matching = mode;
  st.dxe_cycles = dxe.end;

  Usage qe{"qe"};
  Usage vpu_matching{"vpu_matching"};
  Usage engine{"datm_engine"};
  if (mode != MatchingMode::None) {
    std::vector<MatchingTask> tasks;
    for (std::int64_t g : busiest_instance_groups(wl, cfg)) {
      tasks.push_back(matching_task(g, wl.model.n_channels, ratio, mode, cfg));
    }
    VectorIdleFiller filler(dxe.vpu_busy);
    Cycles engine_free = 0;
    for (std::size_t l = 0; l < dxe.sdpa_ready.size(); ++l) {
      const Cycles ready = dxe.sdpa_ready[l];
      MatchingEvent ev{static_cast<Index>(l), ready, -1, ready};
      for (const MatchingTask& task : tasks) {
        if (mode == MatchingMode::DatmEngine) {
          const Interval q = filler.run(ready, task.qe_cycles);
          qe.add(q.start, q.end);
          if (task.qe_cycles > 0) st.matching_cycles += task.qe_cycles;
          const Cycles s = std::max(q.end, engine_free);
          engine_free = s + task.engine_cycles();
          engine.add(s, engine_free);
          st.matching_cycles += task.engine_cycles();
          ev.matching_start = ev.matching_start < 0 ? q.start : std::min(ev.matching_start, q.start);
          ev.matching_end = std::max(ev.matching_end, engine_free);
        } else {
          const Interval v = filler.run(ready, task.vpu_cycles);
          vpu_matching.add(v.start, v.end);
          st.matching_cycles += task.vpu_cycles;
          ev.matching_start = ev.matching_start < 0 ? v.start : std::min(ev.matching_start, v.start);
          ev.matching_end = std::max(ev.matching_end, v.end);
        }
      }
      if (ev.matching_start < 0) ev.matching_start = ready;
      st.events.push_back(ev);
    }
  }

  st.critical_path_cycles = std::max({dxe.end, qe.end, vpu_matching.end, engine.end});
  const Cycles exposed = st.critical_path_cycles - dxe.end;
  st.hidden_matching_cycles = std::max<Cycles>(0, st.matching_cycles - exposed);
  st.engines = {dxe.sa.activity(), dxe.vpu.activity()};
  if (mode == MatchingMode::DatmEngine) {
    st.engines.push_back(qe.activity());
    st.engines.push_back(engine.activity());
  } else if (mode != MatchingMode::None) {
    st.engines.push_back(vpu_matching.activity());
  }
  return st;
}

StepTimeline schedule_rc_step(const HwWorkload& wl, double ratio, const HardwareConfig& cfg) {
  cfg.validate();
  const DxeRun dxe = run_dxe(step_ops(wl, cfg, ratio));
  StepTimeline st;
  st.kind = StepKind::Reduced;
  st.dxe_cycles = dxe.end;
  st.critical_path_cycles = dxe.end;
  st.engines = {dxe.sa.activity(), dxe.vpu.activity()};
  return st;
}

}  // namespace orbis::hwsim
