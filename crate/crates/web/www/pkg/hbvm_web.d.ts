/* tslint:disable */
/* eslint-disable */

export class Convergence {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly h: Float64Array;
    readonly mesh_error: Float64Array;
    /**
     * NaN when every error is at round-off level.
     */
    readonly mesh_order: number;
    readonly uniform_error: Float64Array;
    readonly uniform_order: number;
}

export class Tableau {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Row-major `k × k`.
     */
    readonly a: Float64Array;
    readonly b: Float64Array;
    readonly c: Float64Array;
    readonly label: string;
    readonly order: number;
    /**
     * Largest W-transformation residual.
     */
    readonly residual: number;
    readonly stages: number;
}

export class Trajectory {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly energy: Float64Array;
    readonly iterations: number;
    /**
     * First momentum component, or the second position for problem 2.
     */
    readonly p: Float64Array;
    /**
     * First position component.
     */
    readonly q: Float64Array;
    readonly t: Float64Array;
}

export function convergence(k: number, s: number): Convergence;

export function simulate(problem: number, k: number, s: number, intervals: number): Trajectory;

export function tableau(k: number, s: number): Tableau;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_convergence_free: (a: number, b: number) => void;
    readonly __wbg_tableau_free: (a: number, b: number) => void;
    readonly __wbg_trajectory_free: (a: number, b: number) => void;
    readonly convergence: (a: number, b: number) => [number, number, number];
    readonly convergence_h: (a: number) => [number, number];
    readonly convergence_mesh_error: (a: number) => [number, number];
    readonly convergence_mesh_order: (a: number) => number;
    readonly convergence_uniform_error: (a: number) => [number, number];
    readonly convergence_uniform_order: (a: number) => number;
    readonly simulate: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly tableau: (a: number, b: number) => [number, number, number];
    readonly tableau_a: (a: number) => [number, number];
    readonly tableau_b: (a: number) => [number, number];
    readonly tableau_c: (a: number) => [number, number];
    readonly tableau_label: (a: number) => [number, number];
    readonly tableau_order: (a: number) => number;
    readonly tableau_residual: (a: number) => number;
    readonly tableau_stages: (a: number) => number;
    readonly trajectory_energy: (a: number) => [number, number];
    readonly trajectory_iterations: (a: number) => number;
    readonly trajectory_p: (a: number) => [number, number];
    readonly trajectory_q: (a: number) => [number, number];
    readonly trajectory_t: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
