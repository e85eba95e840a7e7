/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_wavemovie_free: (a: number, b: number) => void;
export const certificate: (a: number, b: number, c: number) => [number, number, number, number];
export const dn_comparison: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const wavemovie_factor_frame: (a: number, b: number) => [number, number];
export const wavemovie_frame: (a: number, b: number) => [number, number];
export const wavemovie_levels: (a: number) => number;
export const wavemovie_max_abs: (a: number) => number;
export const wavemovie_new: (a: number, b: number, c: number, d: number) => [number, number, number];
export const wavemovie_nodes: (a: number) => number;
export const wavemovie_time: (a: number, b: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
