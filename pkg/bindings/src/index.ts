/**
 * Typed bindings for the geoprog CLI.
 *
 * Every call shells out to the `geoprog` executable with `--json` and returns
 * the parsed document unchanged, so results are exactly what the CLI prints.
 * Execution failures surface as typed exceptions carrying the JSON payload.
 */

import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export interface StepError {
  step: number;
  reason: string;
}

export interface ExecutionOutcome {
  status: "Value" | "GrammarError" | "DomainError";
  trace: number[];
  final: number | null;
  error: StepError | null;
}

export interface BeamAttempt {
  rank: number;
  kind: string;
  detail: string;
}

export interface BeamOutcome {
  status: "Answered" | "NoResult";
  chosen_option: number | null;
  chosen_program: string | null;
  chosen_rank: number | null;
  attempts: BeamAttempt[];
}

export interface SolveResult {
  outcome: BeamOutcome;
  programs_tried: number;
  depth_reached: number;
  domain_failures: number;
  stop_reason: string;
  matched_value: number | null;
  correct?: boolean;
}

export interface AnnotationFailure {
  id: string;
  reason: string;
  detail: string;
}

export interface AnnotationReport {
  total_checked: number;
  passed: number;
  failures: AnnotationFailure[];
}

export interface MatchPolicy {
  absTol?: number;
  relTol?: number;
}

export interface SolveOptions extends MatchPolicy {
  maxSteps?: number;
  beam?: number;
  budget?: number;
  answer?: number;
}

export interface ProblemInput {
  vars: number[];
  options: [number, number, number, number];
}

export class GeoprogError extends Error {}

/** The CLI rejected the program text. */
export class ParseError extends GeoprogError {
  constructor(
    message: string,
    public readonly step: number,
    public readonly offset: number,
  ) {
    super(message);
    this.name = "ParseError";
  }
}

/** Static validation failed; carries the full outcome document. */
export class GrammarError extends GeoprogError {
  constructor(public readonly outcome: ExecutionOutcome) {
    super(outcome.error?.reason ?? "grammar error");
    this.name = "GrammarError";
  }
}

/** A step left its mathematical domain; carries the full outcome document. */
export class DomainError extends GeoprogError {
  constructor(public readonly outcome: ExecutionOutcome) {
    super(outcome.error?.reason ?? "domain error");
    this.name = "DomainError";
  }
}

function formatNumbers(values: number[]): string {
  return values.map((v) => String(v)).join(",");
}

function policyFlags(policy?: MatchPolicy): string[] {
  const flags: string[] = [];
  if (policy?.absTol !== undefined) flags.push("--abs-tol", String(policy.absTol));
  if (policy?.relTol !== undefined) flags.push("--rel-tol", String(policy.relTol));
  return flags;
}

export class BoundHandle {
  readonly version: string;

  constructor(readonly cli: string = "geoprog") {
    this.version = this.run(["--version"]).stdout.trim();
  }

  private run(args: string[]): { status: number; stdout: string; stderr: string } {
    const proc = spawnSync(this.cli, args, { encoding: "utf-8" });
    if (proc.error) {
      throw new GeoprogError(`failed to run ${this.cli}: ${proc.error.message}`);
    }
    const status = proc.status ?? -1;
    if (status === 2 || status < 0) {
      throw new GeoprogError(`usage error from ${this.cli}: ${proc.stderr.trim()}`);
    }
    return { status, stdout: proc.stdout, stderr: proc.stderr };
  }

  private runJson(args: string[]): { status: number; data: any } {
    const { status, stdout, stderr } = this.run(args);
    try {
      return { status, data: JSON.parse(stdout) };
    } catch {
      throw new GeoprogError(
        `expected JSON on stdout from ${this.cli} ${args[0]}: ${stderr.trim()}`,
      );
    }
  }

  /** Canonical rendering of a program, or a ParseError. */
  parseProgram(text: string): string {
    const { data } = this.runJson(["parse", "--program", text, "--json"]);
    if (!data.ok) {
      throw new ParseError(data.error.message, data.error.step, data.error.offset);
    }
    return data.canonical;
  }

  /** Execute and return the outcome document whatever its status. */
  tryExecute(programText: string, vars: number[]): ExecutionOutcome {
    const { data } = this.runJson([
      "exec", "--program", programText, "--vars", formatNumbers(vars), "--json",
    ]);
    if (data.status === "ParseError") {
      throw new ParseError(data.error.message, data.error.step, data.error.offset);
    }
    return data as ExecutionOutcome;
  }

  /** Execute; non-Value outcomes raise GrammarError or DomainError. */
  execute(programText: string, vars: number[]): ExecutionOutcome {
    const outcome = this.tryExecute(programText, vars);
    if (outcome.status === "GrammarError") throw new GrammarError(outcome);
    if (outcome.status === "DomainError") throw new DomainError(outcome);
    return outcome;
  }

  /** Run a ranked candidate list against one problem's options. */
  executeBeam(
    candidates: string[],
    vars: number[],
    options: [number, number, number, number],
    policy?: MatchPolicy,
  ): BeamOutcome {
    const dir = mkdtempSync(join(tmpdir(), "geoprog-"));
    try {
      const problem = {
        id: "beam-0",
        text: "",
        diagram: null,
        vars,
        options,
        answer: 0,
        program: null,
        type: "other",
        knowledge: [],
        explanation: null,
        split: "test",
      };
      const datasetPath = join(dir, "problem.json");
      const candsPath = join(dir, "candidates.json");
      const reportPath = join(dir, "report.json");
      writeFileSync(datasetPath, JSON.stringify([problem]));
      writeFileSync(candsPath, JSON.stringify({ "beam-0": candidates }));
      const beam = Math.max(1, candidates.length);
      this.runJson([
        "eval", datasetPath, "--candidates", candsPath, "--beam", String(beam),
        "--out", reportPath, ...policyFlags(policy), "--json",
      ]);
      const report = JSON.parse(readFileSync(reportPath, "utf-8"));
      return report.problems[0].outcomes[String(beam)] as BeamOutcome;
    } finally {
      rmSync(dir, { recursive: true, force: true });
    }
  }

  /** Brute-force search over the problem's variables and options. */
  solve(problem: ProblemInput, config?: SolveOptions): SolveResult {
    const args = [
      "solve",
      "--vars", formatNumbers(problem.vars),
      "--options", formatNumbers(problem.options),
    ];
    if (config?.maxSteps !== undefined) args.push("--max-steps", String(config.maxSteps));
    if (config?.beam !== undefined) args.push("--beam", String(config.beam));
    if (config?.budget !== undefined) args.push("--budget", String(config.budget));
    if (config?.answer !== undefined) args.push("--answer", String(config.answer));
    args.push(...policyFlags(config), "--json");
    return this.runJson(args).data as SolveResult;
  }

  /** Check gold annotations in a problem file (or an in-memory array). */
  verifyAnnotations(
    problems: string | object[],
    opts?: MatchPolicy & { strict?: boolean },
  ): AnnotationReport {
    let path: string;
    let dir: string | null = null;
    if (typeof problems === "string") {
      path = problems;
    } else {
      dir = mkdtempSync(join(tmpdir(), "geoprog-"));
      path = join(dir, "problems.json");
      writeFileSync(path, JSON.stringify(problems));
    }
    try {
      const args = ["verify", path, ...policyFlags(opts), "--json"];
      if (opts?.strict) args.push("--strict");
      return this.runJson(args).data as AnnotationReport;
    } finally {
      if (dir) rmSync(dir, { recursive: true, force: true });
    }
  }
}

/** Locate the CLI and capture its version. */
export function loadEngine(cli?: string): BoundHandle {
  return new BoundHandle(cli ?? process.env.GEOPROG_CLI ?? "geoprog");
}
