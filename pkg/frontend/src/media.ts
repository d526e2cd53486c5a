/**
 * Consequence-imagery panel: shuffles rapidly while cascades arrive, freezes
 * once the system has been stable for freezeMs. Imagery is user-configurable
 * (drop URLs into the `images` array); with no assets the placeholder
 * generator below supplies abstract SVG tiles so the repo ships no imagery.
 */

export class MediaPanel {
  private readonly images: string[];
  private index = 0;

  constructor(images: string[]) {
    this.images = images;
  }

  /** Advance while shuffling; one step per render frame keeps it rapid. */
  advance(shuffling: boolean): string {
    if (shuffling && this.images.length > 0) {
      this.index = (this.index + 7) % this.images.length; // coprime stride
    }
    return this.images[this.index] ?? "";
  }

  get current(): string {
    return this.images[this.index] ?? "";
  }
}

/** Deterministic abstract placeholder tiles as SVG data URLs. */
export function placeholderImages(count: number): string[] {
  const images: string[] = [];
  for (let i = 0; i < count; i++) {
    const hue = (i * 137) % 360;
    const shade = 25 + ((i * 53) % 50);
    const tilt = (i * 31) % 90;
    const svg =
      `<svg xmlns="http://www.w3.org/2000/svg" width="320" height="240">` +
      `<rect width="320" height="240" fill="hsl(${hue},45%,${shade}%)"/>` +
      `<g transform="rotate(${tilt} 160 120)">` +
      `<rect x="40" y="90" width="240" height="18" fill="hsl(${(hue + 180) % 360},60%,70%)" opacity="0.8"/>` +
      `<rect x="70" y="130" width="180" height="10" fill="hsl(${(hue + 90) % 360},55%,60%)" opacity="0.7"/>` +
      `</g>` +
      `<circle cx="${40 + ((i * 97) % 240)}" cy="${40 + ((i * 61) % 160)}" r="22" ` +
      `fill="hsl(${(hue + 40) % 360},70%,75%)" opacity="0.85"/>` +
      `</svg>`;
    images.push(`data:image/svg+xml;utf8,${encodeURIComponent(svg)}`);
  }
  return images;
}
