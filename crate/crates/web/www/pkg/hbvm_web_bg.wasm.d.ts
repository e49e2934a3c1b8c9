/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_convergence_free: (a: number, b: number) => void;
export const __wbg_tableau_free: (a: number, b: number) => void;
export const __wbg_trajectory_free: (a: number, b: number) => void;
export const convergence: (a: number, b: number) => [number, number, number];
export const convergence_h: (a: number) => [number, number];
export const convergence_mesh_error: (a: number) => [number, number];
export const convergence_mesh_order: (a: number) => number;
export const convergence_uniform_error: (a: number) => [number, number];
export const convergence_uniform_order: (a: number) => number;
export const simulate: (a: number, b: number, c: number, d: number) => [number, number, number];
export const tableau: (a: number, b: number) => [number, number, number];
export const tableau_a: (a: number) => [number, number];
export const tableau_b: (a: number) => [number, number];
export const tableau_c: (a: number) => [number, number];
export const tableau_label: (a: number) => [number, number];
export const tableau_order: (a: number) => number;
export const tableau_residual: (a: number) => number;
export const tableau_stages: (a: number) => number;
export const trajectory_energy: (a: number) => [number, number];
export const trajectory_iterations: (a: number) => number;
export const trajectory_p: (a: number) => [number, number];
export const trajectory_q: (a: number) => [number, number];
export const trajectory_t: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
