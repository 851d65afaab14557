from bvwave.cli.main import main

raise SystemExit(main())
