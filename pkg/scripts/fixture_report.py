"""Print every fixture fact with its computed value and timing."""

from hnnresp.corpus import verify_all


def main() -> None:
    results = verify_all()
    for r in results:
        print(f"{r.line()}  [{r.seconds:.2f}s]")
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} facts hold")
    raise SystemExit(1 if failed else 0)


if __name__ == "__main__":
    main()
