/**
 * Counter-based splitmix64 stream: output k of a stream seeded with s is
 * mix64((s + (k+1) * GOLDEN) mod 2^64). Matches the generator used by the
 * evaluation toolkit, so seeds are portable across both packages.
 */

const MASK = (1n << 64n) - 1n;
const GOLDEN = 0x9e3779b97f4a7c15n;
const M1 = 0xbf58476d1ce4e5b9n;
const M2 = 0x94d049bb133111ebn;

export function mix64(z: bigint): bigint {
  z &= MASK;
  z = ((z ^ (z >> 30n)) * M1) & MASK;
  z = ((z ^ (z >> 27n)) * M2) & MASK;
  return z ^ (z >> 31n);
}

/** Mix a master seed with stream indices into an independent child seed. */
export function deriveSeed(seed: bigint | number, ...indices: number[]): bigint {
  let s = BigInt(seed) & MASK;
  for (const ix of indices) {
    s = mix64(s ^ ((BigInt(ix + 1) * GOLDEN) & MASK));
  }
  return s;
}

export class SplitMix64 {
  private readonly seed: bigint;
  private counter = 0n;

  constructor(seed: bigint | number) {
    this.seed = BigInt(seed) & MASK;
  }

  nextU64(): bigint {
    this.counter += 1n;
    return mix64((this.seed + this.counter * GOLDEN) & MASK);
  }

  /** Uniform in [0, 1) with 53-bit resolution. */
  uniform(): number {
    return Number(this.nextU64() >> 11n) / 2 ** 53;
  }

  /** Standard normal via Box-Muller; consumes two draws. */
  normal(): number {
    const u1 = (Number(this.nextU64() >> 11n) + 1) / (2 ** 53 + 1); // (0, 1]
    const u2 = Number(this.nextU64() >> 11n) / 2 ** 53;
    return Math.sqrt(-2 * Math.log(u1)) * Math.cos(2 * Math.PI * u2);
  }

  /** Integer in [0, n); modulo bias is negligible for layout choices. */
  randint(n: number): number {
    return Number(this.nextU64() % BigInt(n));
  }
}
