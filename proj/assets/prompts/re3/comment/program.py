    def story(self):
        ## The story is set in the present day and takes place in the United States.
        ## Joan Westfall is a woman who has died in a car accident. She is a kind and sympathetic person who is eager to help the people she left behind.
        self.Joan_Westfall.gender.append('female')
        ## Brent Westfall is Joan's husband. He is a kind and loving man who is struggling to cope with his wife's death.
        self.Joan_Westfall.relations['husband'] = 'Brent_Westfall'
        self.Brent_Westfall.relations['wife'] = 'Joan_Westfall'
        self.Brent_Westfall.gender.append('male')
        ## Jason Westfall is Joan's son. He is a young boy who is struggling to understand his mother's death.
        self.Joan_Westfall.relations['son'] = 'Jason_Westfall'
        self.Jason_Westfall.relations['mother'] = 'Joan_Westfall'
        self.Jason_Westfall.age.append('young')
        self.Jason_Westfall.gender.append('male')
        ## Jason Westfall sits on the floor, looking at the empty box that used to hold his sister-in-law's belongings.
        self.Jason_Westfall.relations['sister_in_laws'] = 'Joan_Westfall'
        ## His gaze is unfocused. his dark blue eyes brimming with tears.
        self.Jason_Westfall.appearance.append("dark blue eyes")
        ## He cries for hours, eventually falling asleep from exhaustion.
        ## When he wakes up, he feels dazed and ill.
        ## Joan died in a car accident on a rainy day several weeks ago.
        ## Jason has been carrying on with life ever since as best he can manage, but he still doesn't really know how to cope with Joan's death.
