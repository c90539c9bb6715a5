/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const bundledModels: () => [number, number];
export const bundledSource: (a: number, b: number) => [number, number, number, number];
export const noether: (a: number, b: number, c: number, d: number, e: number, f: bigint) => [number, number, number, number];
export const pseudosymmetry: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: bigint) => [number, number, number, number];
export const sectionDivergence: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
