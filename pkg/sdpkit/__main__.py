from sdpkit.cli import main

raise SystemExit(main())
