"""vp-encode: videos/texts to embedding stores, or the /embed service.

Exit codes: 0 success, 1 bad input, 2 decode/encoder failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .encoders import make_encoder
from .errors import DecodeError, EncoderError, InvalidInputError
from .extract import (
    DEFAULT_N_FRAMES,
    ExtractionJob,
    embed_texts_to_store,
    read_manifest,
    run_video_job,
)
from .service import serve_embed


def _add_encoder_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--encoder", default="hash",
                   help="'hash' (hermetic) or 'clip[:model-name]'")
    p.add_argument("--dim", type=int, default=64,
                   help="embedding dimension (hash encoder only)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vp-encode",
        description="embedding-extraction sidecar for the zero-shot video engine",
    )
    sub = parser.add_subparsers(dest="command")

    v = sub.add_parser("videos", help="extract one embedding per video")
    v.add_argument("--manifest", required=True,
                   help="JSON list of {id, path} video entries")
    v.add_argument("--out-store", required=True)
    v.add_argument("--frames", type=int, default=DEFAULT_N_FRAMES)
    v.add_argument("--workers", type=int, default=1)
    _add_encoder_flags(v)

    t = sub.add_parser("texts", help="embed a file of texts, one per line")
    t.add_argument("--in", dest="infile", required=True)
    t.add_argument("--out-store", required=True)
    t.add_argument("--ids",
                   help="optional file of row ids, one per line (default: the texts)")
    _add_encoder_flags(t)

    s = sub.add_parser("serve", help="run the /embed HTTP service")
    s.add_argument("--port", type=int, required=True)
    s.add_argument("--host", default="127.0.0.1")
    _add_encoder_flags(s)

    return parser


def _read_lines(path, what: str) -> list[str]:
    p = Path(path)
    if not p.is_file():
        raise InvalidInputError(f"no such {what} file: {p}")
    return [
        line for line in p.read_text(encoding="utf-8").splitlines() if line.strip()
    ]


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_usage(sys.stderr)
        return 1
    try:
        encoder = make_encoder(args.encoder, dim=args.dim)
        if args.command == "videos":
            job = ExtractionJob(
                videos=tuple(read_manifest(args.manifest)),
                out_store=Path(args.out_store),
                n_frames=args.frames,
                encoder_name=args.encoder,
            )
            out = run_video_job(job, encoder, workers=max(1, args.workers))
            print(f"wrote {len(job.videos)} video embeddings to {out}")
        elif args.command == "texts":
            texts = _read_lines(args.infile, "text")
            ids = _read_lines(args.ids, "id") if args.ids else None
            out = embed_texts_to_store(texts, encoder, args.out_store, ids)
            print(f"wrote {len(texts)} text embeddings to {out}")
        else:
            serve_embed(args.port, encoder, host=args.host)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DecodeError, EncoderError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:  # e.g. the serve port is taken
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
