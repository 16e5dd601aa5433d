/** Payload shapes mirrored from the it2fgp HTTP service. */

export interface GoalJson {
  kind: "max-goal" | "min-goal";
  aspiration: number;
  limit: number;
  objective: number;
}

export interface ProposalJson {
  iteration: number;
  x: number[];
  objectives: number[];
  memberships: number[];
  beta: number;
  deviations: number[];
  linearization_points: number[][];
}

export interface DecisionJson {
  verdict: "satisfied" | "revise";
  targets?: number[];
}

export interface IterationJson {
  goals: GoalJson[];
  proposal: ProposalJson;
  decision: DecisionJson | null;
}

export interface ObjectiveInfo {
  index: number;
  name: string;
  sense: "maximize" | "minimize";
}

export interface SessionJson {
  id: string;
  created_at: string;
  status: "awaiting-decision" | "finished" | "failed";
  variables: string[];
  objectives: ObjectiveInfo[];
  iterations: IterationJson[];
  original_goals?: GoalJson[];
  box?: { lower: number[]; upper: number[] };
  payoff?: unknown;
  proposal?: ProposalJson;
  failure?: { stage: string; message: string };
}

export interface FixtureInfo {
  name: string;
  kind: "crisp" | "fuzzy";
  variables: string[];
  objectives: string[];
  constraints: number;
}

export interface CreateSessionResponse {
  id: string;
  status: string;
  proposal: ProposalJson;
}

/** One per-objective gauge: target level, current tolerance limit,
 * achieved value and membership of the incumbent proposal. */
export interface GoalGauge {
  objective: number;
  name: string;
  sense: "maximize" | "minimize";
  aspiration: number;
  limit: number;
  achieved: number;
  membership: number;
}

export interface TimelineEntry {
  iteration: number;
  memberships: number[];
  objectives: number[];
  beta: number;
  decision: DecisionJson | null;
}

/** Everything the console renders; numbers are copied verbatim from the
 * service payload (no client-side recomputation). */
export interface SessionView {
  id: string;
  status: SessionJson["status"];
  awaiting: boolean;
  variables: string[];
  objectives: ObjectiveInfo[];
  x: number[];
  beta: number;
  gauges: GoalGauge[];
  timeline: TimelineEntry[];
  failure?: { stage: string; message: string };
}
