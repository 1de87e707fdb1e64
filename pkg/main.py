def main():
    """Launch autoform on the packaged micro benchmark."""
    import sys
    from autoform.__main__ import main as autoform_main

    argv = sys.argv[1:] or [
        "run", "--dataset", "data/benchmarks/micro.jsonl", "--config", "data/config/micro.json", "--out", "runs/micro",
    ]
    return autoform_main(argv)


if __name__ == "__main__":
    raise SystemExit(main())
