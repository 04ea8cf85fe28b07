/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_patterntrainer_free: (a: number, b: number) => void;
export const __wbg_sectorview_free: (a: number, b: number) => void;
export const patterntrainer_metrics: (a: number) => [number, number, number, number];
export const patterntrainer_new: (a: number, b: number, c: number, d: number, e: bigint, f: number) => [number, number, number];
export const patterntrainer_relation_count: (a: number) => number;
export const patterntrainer_relation_name: (a: number, b: number) => [number, number];
export const patterntrainer_sector_bounds: (a: number, b: number, c: number, d: number) => [number, number];
export const patterntrainer_step: (a: number, b: number) => [number, number, number];
export const patterntrainer_steps_done: (a: number) => bigint;
export const sectorview_area: (a: number) => number;
export const sectorview_bounds: (a: number) => [number, number];
export const sectorview_distance: (a: number, b: number, c: number) => number;
export const sectorview_distance_field: (a: number, b: number, c: number) => [number, number];
export const sectorview_modulus_profile: (a: number, b: number, c: number) => [number, number];
export const sectorview_new: (a: number, b: number, c: number, d: number, e: number) => number;
export const sectorview_phase_profile: (a: number, b: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
