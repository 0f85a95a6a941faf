//! Simulated coordinator/worker deployment. The coordinator owns the global
//! FIFO order and assigns arrivals to worker partitions round-robin; each
//! worker runs the configured scheme over its own partition. The dominator
//! product factorizes over any partition of the window, so multiplying the
//! workers' partial products reproduces the single-node result exactly.
//!
//! Every event runs under a synchronous barrier: a broadcast must be
//! answered by all m workers before the next event is admitted, which makes
//! the distributed run bisimilar to the sequential one.

use std::collections::BTreeMap;
use std::time::Instant;

use crate::core::item::{normalize_and_sort, SortedProfile, UncertainItem};
use crate::core::window::{SlidingWindow, WindowEntry};
use crate::engine::{EngineConfig, EventStats, SchemeState};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MessageKind {
    ArrivalBroadcast,
    DepartureBroadcast,
    PartialResult,
    Ack,
}

impl MessageKind {
    fn as_str(&self) -> &'static str {
        match self {
            MessageKind::ArrivalBroadcast => "arrival",
            MessageKind::DepartureBroadcast => "departure",
            MessageKind::PartialResult => "partial",
            MessageKind::Ack => "ack",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    /// Item record being broadcast; arrivals name the assigned partition.
    Item {
        item: UncertainItem,
        assigned: Option<usize>,
    },
    /// A worker's dominator partial product plus its partition stats.
    Partial {
        partial: f64,
        compared: u64,
        pruned: u64,
        window_size: u64,
    },
    /// Per-partition stats for a departure pass.
    Stats {
        compared: u64,
        pruned: u64,
        window_size: u64,
    },
    /// Finalized probability sent back to the assigned partition.
    FinalProb { prob: f64 },
}

/// One message on the coordinator/worker wire. `worker_id` is the worker
/// endpoint of the exchange (destination for broadcasts, sender for replies).
#[derive(Debug, Clone, PartialEq)]
pub struct NodeMessage {
    pub kind: MessageKind,
    pub event_id: u64,
    pub worker_id: usize,
    pub payload: Payload,
}

impl NodeMessage {
    /// Line format: kind, event_id, worker_id, payload tag, payload fields.
    /// Reals print at full round-trip precision.
    pub fn encode(&self) -> String {
        let head = format!(
            "{},{},{}",
            self.kind.as_str(),
            self.event_id,
            self.worker_id
        );
        match &self.payload {
            Payload::Item { item, assigned } => {
                let assigned = assigned.map_or("-".to_string(), |a| a.to_string());
                format!("{head},item,{assigned},{}", item.to_line())
            }
            Payload::Partial {
                partial,
                compared,
                pruned,
                window_size,
            } => {
                format!("{head},partial,{partial},{compared},{pruned},{window_size}")
            }
            Payload::Stats {
                compared,
                pruned,
                window_size,
            } => {
                format!("{head},stats,{compared},{pruned},{window_size}")
            }
            Payload::FinalProb { prob } => format!("{head},prob,{prob}"),
        }
    }

    pub fn decode(line: &str) -> Result<Self> {
        let parts: Vec<&str> = line.trim().splitn(5, ',').collect();
        if parts.len() < 5 {
            return Err(Error::Parse(format!("short message line: {line:?}")));
        }
        let kind = match parts[0] {
            "arrival" => MessageKind::ArrivalBroadcast,
            "departure" => MessageKind::DepartureBroadcast,
            "partial" => MessageKind::PartialResult,
            "ack" => MessageKind::Ack,
            other => return Err(Error::Parse(format!("unknown message kind {other:?}"))),
        };
        let event_id: u64 = parts[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad event id {:?}", parts[1])))?;
        let worker_id: usize = parts[2]
            .parse()
            .map_err(|_| Error::Parse(format!("bad worker id {:?}", parts[2])))?;
        let rest = parts[4];
        let payload = match parts[3] {
            "item" => {
                let (assigned, item_line) = rest
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("bad item payload: {rest:?}")))?;
                let assigned =
                    if assigned == "-" {
                        None
                    } else {
                        Some(assigned.parse().map_err(|_| {
                            Error::Parse(format!("bad assigned worker {assigned:?}"))
                        })?)
                    };
                Payload::Item {
                    item: UncertainItem::from_line(item_line)?,
                    assigned,
                }
            }
            "partial" => {
                let f: Vec<&str> = rest.split(',').collect();
                if f.len() != 4 {
                    return Err(Error::Parse(format!("bad partial payload: {rest:?}")));
                }
                Payload::Partial {
                    partial: f[0]
                        .parse()
                        .map_err(|_| Error::Parse("bad partial".into()))?,
                    compared: f[1]
                        .parse()
                        .map_err(|_| Error::Parse("bad compared".into()))?,
                    pruned: f[2]
                        .parse()
                        .map_err(|_| Error::Parse("bad pruned".into()))?,
                    window_size: f[3]
                        .parse()
                        .map_err(|_| Error::Parse("bad window".into()))?,
                }
            }
            "stats" => {
                let f: Vec<&str> = rest.split(',').collect();
                if f.len() != 3 {
                    return Err(Error::Parse(format!("bad stats payload: {rest:?}")));
                }
                Payload::Stats {
                    compared: f[0]
                        .parse()
                        .map_err(|_| Error::Parse("bad compared".into()))?,
                    pruned: f[1]
                        .parse()
                        .map_err(|_| Error::Parse("bad pruned".into()))?,
                    window_size: f[2]
                        .parse()
                        .map_err(|_| Error::Parse("bad window".into()))?,
                }
            }
            "prob" => Payload::FinalProb {
                prob: rest.parse().map_err(|_| Error::Parse("bad prob".into()))?,
            },
            other => return Err(Error::Parse(format!("unknown payload tag {other:?}"))),
        };
        Ok(Self {
            kind,
            event_id,
            worker_id,
            payload,
        })
    }
}

/// One edge node: a disjoint partition of the global window plus the
/// scheme's local index structures. Single writer: the cluster.
#[derive(Debug, Clone)]
struct Worker {
    window: SlidingWindow,
    state: SchemeState,
    /// Entry ids exactly checked during the current event.
    inspected: std::collections::HashSet<u64>,
    pending: Option<(UncertainItem, SortedProfile)>,
}

impl Worker {
    fn new(cfg: &EngineConfig, partition_capacity: usize) -> Self {
        Self {
            window: SlidingWindow::new(partition_capacity),
            state: SchemeState::new(cfg),
            inspected: std::collections::HashSet::new(),
            pending: None,
        }
    }

    fn begin_event(&mut self) {
        self.inspected.clear();
        self.pending = None;
    }

    /// Removes the departed entry if locally owned, then runs the scheme's
    /// departure pass over the remaining local entries.
    fn handle_departure(
        &mut self,
        departed: &UncertainItem,
        departed_profile: &SortedProfile,
        k: usize,
    ) -> Payload {
        if self.window.get(departed.id).is_some() {
            self.state.remove(departed.id);
            self.window.remove(departed.id);
        }
        let rep = self
            .state
            .departure_pass(&mut self.window, departed, departed_profile, k);
        let pass_compared = rep.inspected.len() as u64;
        self.inspected.extend(rep.inspected);
        let window_size = self.window.len() as u64;
        Payload::Stats {
            compared: pass_compared,
            pruned: window_size - pass_compared,
            window_size,
        }
    }

    /// Arrival pass over local entries plus the local dominator partial
    /// product for the incoming item. The assigned worker holds the item
    /// until the coordinator sends back the finalized probability.
    fn handle_arrival(
        &mut self,
        arrived: &UncertainItem,
        profile: &SortedProfile,
        assigned_here: bool,
        k: usize,
    ) -> Payload {
        let window_size = self.window.len() as u64;
        let rep = self
            .state
            .arrival_pass(&mut self.window, arrived, profile, k);
        self.inspected.extend(rep.inspected);
        // Matching the single-node engine, `compared` counts only the two
        // probability-update passes, not the new item's dominator scan.
        let (partial, _calc_rep) = self.state.calculate(&self.window, arrived, profile, k);
        if assigned_here {
            self.pending = Some((arrived.clone(), profile.clone()));
        }
        let compared = self.inspected.len() as u64;
        Payload::Partial {
            partial,
            compared,
            pruned: window_size - compared,
            window_size,
        }
    }

    fn finalize(&mut self, prob: f64) {
        let (item, profile) = self
            .pending
            .take()
            .expect("finalize without a pending arrival");
        self.state.insert(&profile);
        self.window.push(WindowEntry::new(item, profile, prob));
    }
}

#[derive(Debug, Clone)]
pub struct ClusterEventResult {
    pub stats: EventStats,
    /// Per-worker dominator partial products, in worker order.
    pub partials: Vec<f64>,
    pub final_prob: f64,
}

/// Coordinator plus m workers. Results are exactly those of the single-node
/// engine; with m = 1 the arithmetic is identical operation for operation.
#[derive(Debug, Clone)]
pub struct Cluster {
    cfg: EngineConfig,
    m: usize,
    workers: Vec<Worker>,
    /// Global FIFO: (item id, owning worker), oldest first.
    fifo: std::collections::VecDeque<(u64, usize)>,
    next_worker: usize,
    last_id: Option<u64>,
    trace: Option<Vec<NodeMessage>>,
}

impl Cluster {
    pub fn new(cfg: EngineConfig, m: usize) -> Result<Self> {
        cfg.validate()?;
        if m < 1 {
            return Err(Error::Cluster("cluster needs at least one worker".into()));
        }
        // Round-robin assignment against FIFO eviction keeps partition sizes
        // within ceil(capacity / m).
        let partition_capacity = cfg.capacity.div_ceil(m);
        let workers = (0..m)
            .map(|_| Worker::new(&cfg, partition_capacity))
            .collect();
        Ok(Self {
            cfg,
            m,
            workers,
            fifo: std::collections::VecDeque::new(),
            next_worker: 0,
            last_id: None,
            trace: None,
        })
    }

    /// Enables message-trace recording (one entry per delivered message).
    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn trace(&self) -> Option<&[NodeMessage]> {
        self.trace.as_deref()
    }

    pub fn workers(&self) -> usize {
        self.m
    }

    fn record(&mut self, msg: NodeMessage) {
        if let Some(trace) = &mut self.trace {
            trace.push(msg);
        }
    }

    fn total_len(&self) -> usize {
        self.workers.iter().map(|w| w.window.len()).sum()
    }

    pub fn process_event(&mut self, item: UncertainItem) -> Result<ClusterEventResult> {
        if item.dim() != self.cfg.d {
            return Err(Error::Invalid(format!(
                "item {} has {} dimensions, cluster expects {}",
                item.id,
                item.dim(),
                self.cfg.d
            )));
        }
        if let Some(last) = self.last_id {
            if item.id <= last {
                return Err(Error::OutOfOrder { got: item.id, last });
            }
        }
        self.last_id = Some(item.id);
        let k = self.cfg.k;
        let event_id = item.id;
        let start = Instant::now();
        let profile = normalize_and_sort(&item, &self.cfg.norm);

        for w in &mut self.workers {
            w.begin_event();
        }

        if self.total_len() == self.cfg.capacity {
            let (old_id, owner) = self
                .fifo
                .pop_front()
                .ok_or_else(|| Error::Cluster("full window with empty FIFO".into()))?;
            // The owner surrenders the payload so the departure can be
            // broadcast to every partition.
            let old = self.workers[owner]
                .window
                .get(old_id)
                .cloned()
                .ok_or_else(|| Error::Cluster(format!("worker {owner} lost item {old_id}")))?;
            let mut acks = 0usize;
            for w in 0..self.m {
                self.record(NodeMessage {
                    kind: MessageKind::DepartureBroadcast,
                    event_id,
                    worker_id: w,
                    payload: Payload::Item {
                        item: old.item.clone(),
                        assigned: None,
                    },
                });
                let payload = self.workers[w].handle_departure(&old.item, &old.profile, k);
                acks += 1;
                self.record(NodeMessage {
                    kind: MessageKind::Ack,
                    event_id,
                    worker_id: w,
                    payload,
                });
            }
            if acks != self.m {
                return Err(Error::Cluster(format!(
                    "departure broadcast answered by {acks} of {} workers",
                    self.m
                )));
            }
        }

        let assigned = self.next_worker;
        self.next_worker = (self.next_worker + 1) % self.m;
        self.fifo.push_back((event_id, assigned));

        let mut partials = Vec::with_capacity(self.m);
        let mut compared = 0u64;
        let mut window_size = 0u64;
        for w in 0..self.m {
            self.record(NodeMessage {
                kind: MessageKind::ArrivalBroadcast,
                event_id,
                worker_id: w,
                payload: Payload::Item {
                    item: item.clone(),
                    assigned: Some(assigned),
                },
            });
            let payload = self.workers[w].handle_arrival(&item, &profile, w == assigned, k);
            if let Payload::Partial {
                partial,
                compared: c,
                window_size: n,
                ..
            } = payload
            {
                partials.push(partial);
                compared += c;
                window_size += n;
            }
            self.record(NodeMessage {
                kind: MessageKind::PartialResult,
                event_id,
                worker_id: w,
                payload,
            });
        }
        if partials.len() != self.m {
            return Err(Error::Cluster(format!(
                "arrival broadcast answered by {} of {} workers",
                partials.len(),
                self.m
            )));
        }

        let final_prob = item.prob * partials.iter().product::<f64>();
        self.record(NodeMessage {
            kind: MessageKind::Ack,
            event_id,
            worker_id: assigned,
            payload: Payload::FinalProb { prob: final_prob },
        });
        self.workers[assigned].finalize(final_prob);

        Ok(ClusterEventResult {
            stats: EventStats {
                event_id,
                scheme: self.cfg.scheme,
                window_size,
                compared,
                pruned: window_size - compared,
                wall_nanos: start.elapsed().as_nanos(),
            },
            partials,
            final_prob,
        })
    }

    /// Current probabilities across all partitions, keyed by item id.
    pub fn probabilities(&self) -> BTreeMap<u64, f64> {
        let mut out = BTreeMap::new();
        for w in &self.workers {
            for e in w.window.entries() {
                out.insert(e.item.id, e.ksky_prob);
            }
        }
        out
    }

    /// Item ids per partition, in local arrival order.
    pub fn partition_ids(&self) -> Vec<Vec<u64>> {
        self.workers
            .iter()
            .map(|w| w.window.ids().collect())
            .collect()
    }
}
